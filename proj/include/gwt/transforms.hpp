#pragma once

#include <cstdint>
#include <map>

#include "gwt/offspring.hpp"
#include "gwt/tree.hpp"

namespace gwt {

// A tree-to-tree map together with the node correspondence: every source
// node selected by the construction maps to exactly one image node.
struct LabeledMap {
    Tree source = Tree::leaf();
    Tree image = Tree::leaf();
    std::map<NodeLabel, NodeLabel> correspondence;
};

// Image tree carried by the leaves: the leftmost leaf below a node is its
// representative, and each leaf collects the representatives of the
// subtrees hanging right of its chain of left ancestors, ordered ancestor
// first.  The image has one node per source leaf.
LabeledMap leaf_tree(const Tree& t);

// Image tree carried by the nodes whose degree lies in the set, taken in
// preorder: each node after the first hangs as a new rightmost child under
// the image of the first marked node of the subtree rooted at the common
// ancestor with its predecessor.  EmptyMark when no node qualifies.
LabeledMap outdegree_tree(const Tree& t, const DegreeSet& set);

// Law of the image of outdegree_tree over trees of at most card_max nodes.
// Masses are unnormalized; empty_mass collects source trees with no marked
// node, deficit what the enumeration never reached.
struct PushforwardLaw {
    std::map<Tree, double> law;
    double captured = 0.0;
    double empty_mass = 0.0;
    double deficit = 0.0;
};
PushforwardLaw pushforward_law(const OffspringDistribution& p, const DegreeSet& set,
                               std::int64_t card_max, std::uint64_t budget = 100000);

}  // namespace gwt
