#include "gwt/transforms.hpp"

#include <algorithm>
#include <vector>

#include "gwt/exact.hpp"

namespace gwt {

namespace {

// Freeze an image given child lists in final order: emit the canonical
// preorder encoding and the correspondence image labels.
LabeledMap freeze(const Tree& source, const std::vector<NodeLabel>& source_labels,
                  const std::vector<std::vector<std::size_t>>& kids, std::size_t root) {
    std::vector<std::int64_t> seq;
    LabeledMap out;
    out.source = source;
    auto emit = [&](auto&& self, std::size_t node, const NodeLabel& at) -> void {
        seq.push_back(static_cast<std::int64_t>(kids[node].size()));
        out.correspondence.emplace(source_labels[node], at);
        std::int64_t i = 0;
        for (std::size_t child : kids[node]) self(self, child, at.child(++i));
    };
    emit(emit, root, NodeLabel());
    out.image = Tree::decode(std::move(seq));
    return out;
}

}  // namespace

LabeledMap leaf_tree(const Tree& t) {
    const std::vector<std::int64_t>& deg = t.degrees();
    std::size_t n = t.card();
    std::vector<NodeLabel> labels = t.labels();
    std::vector<std::int64_t> parent = t.parent_indices();

    // Left leaf of i: first-child chains step through consecutive preorder
    // indices, so it is the next leaf at or after i.
    std::vector<std::size_t> left_leaf(n);
    std::size_t last = 0;
    for (std::size_t i = n; i-- > 0;) {
        if (deg[i] == 0) last = i;
        left_leaf[i] = last;
    }

    std::vector<std::size_t> leaves;
    std::vector<std::size_t> leaf_id(n, 0);  // preorder index -> leaf rank
    for (std::size_t i = 0; i < n; ++i)
        if (deg[i] == 0) {
            leaf_id[i] = leaves.size();
            leaves.push_back(i);
        }

    // Attach each non-root leaf under the left leaf of its anchor's parent,
    // ordered by (ancestor, child index) of the anchor: the highest ancestor
    // whose left branch ends at the leaf.
    struct Entry {
        std::size_t anchor_parent;
        std::int64_t child_index;
        std::size_t leaf;
    };
    std::vector<std::vector<Entry>> entries(leaves.size());
    for (std::size_t w : leaves) {
        std::size_t a = w;
        while (parent[a] >= 0 && left_leaf[static_cast<std::size_t>(parent[a])] == w)
            a = static_cast<std::size_t>(parent[a]);
        if (parent[a] < 0) continue;  // w is the image root
        std::size_t u = static_cast<std::size_t>(parent[a]);
        entries[leaf_id[left_leaf[u]]].push_back({u, labels[a].path().back(), w});
    }
    std::vector<std::vector<std::size_t>> kids(leaves.size());
    std::vector<NodeLabel> leaf_labels(leaves.size());
    for (std::size_t v = 0; v < leaves.size(); ++v) {
        std::sort(entries[v].begin(), entries[v].end(), [](const Entry& a, const Entry& b) {
            return a.anchor_parent != b.anchor_parent ? a.anchor_parent < b.anchor_parent
                                                     : a.child_index < b.child_index;
        });
        for (const Entry& e : entries[v]) kids[v].push_back(leaf_id[e.leaf]);
        leaf_labels[v] = labels[leaves[v]];
    }
    return freeze(t, leaf_labels, kids, leaf_id[left_leaf[0]]);
}

LabeledMap outdegree_tree(const Tree& t, const DegreeSet& set) {
    if (set.trivially_empty()) throw EmptyMark("mark set has no degrees");
    const std::vector<std::int64_t>& deg = t.degrees();
    std::vector<std::size_t> marked;
    for (std::size_t i = 0; i < t.card(); ++i)
        if (set.contains(deg[i])) marked.push_back(i);
    if (marked.empty()) throw EmptyMark("tree has no node with degree in the set");

    std::vector<NodeLabel> labels = t.labels();
    std::vector<std::int64_t> sizes = t.subtree_sizes();
    std::vector<std::vector<std::size_t>> kids(marked.size());
    std::vector<NodeLabel> marked_labels(marked.size());
    marked_labels[0] = labels[marked[0]];
    for (std::size_t k = 1; k < marked.size(); ++k) {
        marked_labels[k] = labels[marked[k]];
        NodeLabel m = mrca(labels[marked[k - 1]], labels[marked[k]]);
        std::size_t m_idx = *t.index_of(m);
        // First marked node inside the subtree at the common ancestor; the
        // subtree is the contiguous preorder block starting there.
        auto it = std::lower_bound(marked.begin(), marked.end(), m_idx);
        std::size_t v = static_cast<std::size_t>(it - marked.begin());
        kids[v].push_back(k);
    }
    return freeze(t, marked_labels, kids, 0);
}

PushforwardLaw pushforward_law(const OffspringDistribution& p, const DegreeSet& set,
                               std::int64_t card_max, std::uint64_t budget) {
    if (set.trivially_empty()) throw EmptyMark("mark set has no degrees");
    PushforwardLaw out;
    double captured = 0.0, empty = 0.0;
    enumerate_trees(p, card_max, budget, [&](const Tree& t, double pr) {
        if (t.count_outdegree(set) == 0) {
            empty += pr;
            return;
        }
        out.law[outdegree_tree(t, set).image] += pr;
        captured += pr;
    });
    out.captured = captured;
    out.empty_mass = empty;
    out.deficit = 1.0 - captured - empty;
    return out;
}

}  // namespace gwt
