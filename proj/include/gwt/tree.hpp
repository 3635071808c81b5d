#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwt/errors.hpp"

namespace gwt {

// Node address in the Ulam-Harris scheme: the sequence of 1-based child
// indices from the root.  The root is the empty label.
class NodeLabel {
  public:
    NodeLabel() = default;
    explicit NodeLabel(std::vector<std::int64_t> path);

    std::size_t generation() const { return path_.size(); }
    bool is_root() const { return path_.empty(); }
    const std::vector<std::int64_t>& path() const { return path_; }

    NodeLabel child(std::int64_t index) const;
    NodeLabel parent() const;  // root has no parent: DomainError
    NodeLabel concat(const NodeLabel& suffix) const;

    // True when *this is a strict ancestor of other.
    bool is_ancestor_of(const NodeLabel& other) const;

    std::string to_string() const;  // e.g. "<>" for the root, "<1,2>" otherwise

    auto operator<=>(const NodeLabel&) const = default;

  private:
    std::vector<std::int64_t> path_;
};

// Longest common prefix; the result may equal one of the inputs.
NodeLabel mrca(const NodeLabel& a, const NodeLabel& b);
NodeLabel mrca(const std::vector<NodeLabel>& labels);  // EmptySet on empty input

// Set of admissible out-degrees.  Either a finite set or the complement of a
// finite set, which covers every case used here ({0}, {2}, all naturals,
// positive naturals, ...).
class DegreeSet {
  public:
    static DegreeSet of(std::vector<std::int64_t> elements);
    static DegreeSet complement_of(std::vector<std::int64_t> elements);
    static DegreeSet naturals() { return complement_of({}); }
    static DegreeSet positive() { return complement_of({0}); }

    bool contains(std::int64_t k) const;
    bool is_complement() const { return complement_; }
    const std::vector<std::int64_t>& base_elements() const { return elements_; }
    // Finite DegreeSet with no elements; the conditioning ops reject this.
    bool trivially_empty() const { return !complement_ && elements_.empty(); }

    std::string to_string() const;
    static DegreeSet parse(const std::string& text);  // "0,2" | "all" | "positive" | "co:0,1"

    auto operator<=>(const DegreeSet&) const = default;

  private:
    DegreeSet(bool complement, std::vector<std::int64_t> elements);
    bool complement_ = false;
    std::vector<std::int64_t> elements_;  // sorted, unique
};

// Finite rooted ordered tree stored as the preorder sequence of out-degrees
// (Lukasiewicz encoding).  Valid sequences satisfy: partial sums of (k_i - 1)
// stay >= 0 strictly before the end and equal -1 at the end.
class Tree {
  public:
    // Validates the encoding; MalformedEncoding otherwise.
    static Tree decode(std::vector<std::int64_t> degrees);
    static Tree leaf() { return decode({0}); }
    static Tree parse_parens(const std::string& text);  // "(()())" form

    const std::vector<std::int64_t>& degrees() const { return degrees_; }
    std::size_t card() const { return degrees_.size(); }
    std::int64_t height() const;

    // Number of nodes whose out-degree lies in the set; EmptySet if the set
    // is trivially empty.
    std::int64_t count_outdegree(const DegreeSet& set) const;
    std::int64_t generation_size(std::int64_t n) const;

    // Preorder node labels; index i corresponds to degrees()[i].
    std::vector<NodeLabel> labels() const;
    std::vector<std::int64_t> depths() const;
    // Parent preorder index per node; -1 for the root.
    std::vector<std::int64_t> parent_indices() const;
    // Number of nodes in the subtree rooted at preorder index i.
    std::vector<std::int64_t> subtree_sizes() const;

    std::optional<std::size_t> index_of(const NodeLabel& label) const;
    bool is_leaf(const NodeLabel& label) const;

    std::string to_parens() const;
    std::string to_string() const { return to_parens(); }

    auto operator<=>(const Tree&) const = default;

  private:
    explicit Tree(std::vector<std::int64_t> degrees) : degrees_(std::move(degrees)) {}
    std::vector<std::int64_t> degrees_;
};

// Tree truncated at a fixed height: every node at the cap generation has
// recorded degree zero, so height() <= cap.
class RestrictedTree {
  public:
    RestrictedTree(Tree tree, std::int64_t cap);

    const Tree& tree() const { return tree_; }
    std::int64_t cap() const { return cap_; }
    std::int64_t generation_size_at_cap() const { return tree_.generation_size(cap_); }

    auto operator<=>(const RestrictedTree&) const = default;

  private:
    Tree tree_;
    std::int64_t cap_;
};

// Drop every node strictly below generation h.  Idempotent; restrict(t,h)
// equals t whenever height(t) <= h.
RestrictedTree restrict_tree(const Tree& t, std::int64_t h);

// Replace the leaf x of t by the root of s (node sets glued along x).
Tree graft(const Tree& t, const NodeLabel& x, const Tree& s);

}  // namespace gwt
