#include "gwt/tree.hpp"

#include <algorithm>
#include <sstream>

namespace gwt {

NodeLabel::NodeLabel(std::vector<std::int64_t> path) : path_(std::move(path)) {
    for (std::int64_t i : path_)
        if (i < 1) throw DomainError("node label indices are 1-based positive");
}

NodeLabel NodeLabel::child(std::int64_t index) const {
    if (index < 1) throw DomainError("child index must be >= 1");
    std::vector<std::int64_t> p = path_;
    p.push_back(index);
    return NodeLabel(std::move(p));
}

NodeLabel NodeLabel::parent() const {
    if (path_.empty()) throw DomainError("root has no parent");
    std::vector<std::int64_t> p(path_.begin(), path_.end() - 1);
    return NodeLabel(std::move(p));
}

NodeLabel NodeLabel::concat(const NodeLabel& suffix) const {
    std::vector<std::int64_t> p = path_;
    p.insert(p.end(), suffix.path_.begin(), suffix.path_.end());
    return NodeLabel(std::move(p));
}

bool NodeLabel::is_ancestor_of(const NodeLabel& other) const {
    if (path_.size() >= other.path_.size()) return false;
    return std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string NodeLabel::to_string() const {
    std::ostringstream os;
    os << '<';
    for (std::size_t i = 0; i < path_.size(); ++i) {
        if (i) os << ',';
        os << path_[i];
    }
    os << '>';
    return os.str();
}

NodeLabel mrca(const NodeLabel& a, const NodeLabel& b) {
    std::size_t n = std::min(a.path().size(), b.path().size());
    std::size_t i = 0;
    while (i < n && a.path()[i] == b.path()[i]) ++i;
    return NodeLabel(std::vector<std::int64_t>(a.path().begin(), a.path().begin() + i));
}

NodeLabel mrca(const std::vector<NodeLabel>& labels) {
    if (labels.empty()) throw EmptySet("mrca of an empty label set");
    NodeLabel acc = labels.front();
    for (std::size_t i = 1; i < labels.size(); ++i) acc = mrca(acc, labels[i]);
    return acc;
}

DegreeSet::DegreeSet(bool complement, std::vector<std::int64_t> elements)
    : complement_(complement), elements_(std::move(elements)) {
    for (std::int64_t k : elements_)
        if (k < 0) throw DomainError("degree set elements must be >= 0");
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

DegreeSet DegreeSet::of(std::vector<std::int64_t> elements) {
    return DegreeSet(false, std::move(elements));
}

DegreeSet DegreeSet::complement_of(std::vector<std::int64_t> elements) {
    return DegreeSet(true, std::move(elements));
}

bool DegreeSet::contains(std::int64_t k) const {
    bool in = std::binary_search(elements_.begin(), elements_.end(), k);
    return complement_ ? !in : in;
}

std::string DegreeSet::to_string() const {
    if (complement_ && elements_.empty()) return "all";
    if (complement_ && elements_ == std::vector<std::int64_t>{0}) return "positive";
    std::ostringstream os;
    if (complement_) os << "co:";
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (i) os << ',';
        os << elements_[i];
    }
    return os.str();
}

DegreeSet DegreeSet::parse(const std::string& text) {
    if (text == "all") return naturals();
    if (text == "positive" || text == "nonleaf") return positive();
    bool complement = false;
    std::string body = text;
    if (body.rfind("co:", 0) == 0) {
        complement = true;
        body = body.substr(3);
    }
    std::vector<std::int64_t> elems;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad degree set element: " + item);
        }
        if (pos != item.size() || v < 0) throw ConfigError("bad degree set element: " + item);
        elems.push_back(v);
    }
    if (elems.empty() && !complement) throw ConfigError("empty degree set: " + text);
    return complement ? complement_of(std::move(elems)) : of(std::move(elems));
}

Tree Tree::decode(std::vector<std::int64_t> degrees) {
    if (degrees.empty()) throw MalformedEncoding("empty degree sequence");
    std::int64_t open = 1;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] < 0) throw MalformedEncoding("negative out-degree");
        open += degrees[i] - 1;
        if (open <= 0 && i + 1 < degrees.size())
            throw MalformedEncoding("degree sequence closes before the end");
    }
    if (open != 0) throw MalformedEncoding("degree sequence leaves open stubs");
    return Tree(std::move(degrees));
}

Tree Tree::parse_parens(const std::string& text) {
    // "(...)": each '(' opens a node, its children are the juxtaposed groups.
    std::vector<std::int64_t> degrees;
    std::vector<std::size_t> stack;  // preorder indices of open nodes
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n') continue;
        if (c == '(') {
            if (!stack.empty()) ++degrees[stack.back()];
            if (stack.empty() && !degrees.empty())
                throw MalformedEncoding("multiple roots in parenthesized tree");
            stack.push_back(degrees.size());
            degrees.push_back(0);
        } else if (c == ')') {
            if (stack.empty()) throw MalformedEncoding("unbalanced ')'");
            stack.pop_back();
        } else {
            throw MalformedEncoding(std::string("unexpected character '") + c + "'");
        }
    }
    if (!stack.empty()) throw MalformedEncoding("unbalanced '('");
    return decode(std::move(degrees));
}

std::int64_t Tree::height() const {
    std::int64_t best = 0;
    for (std::int64_t d : depths()) best = std::max(best, d);
    return best;
}

std::vector<std::int64_t> Tree::depths() const {
    std::vector<std::int64_t> out(degrees_.size());
    std::vector<std::int64_t> pending;
    std::int64_t depth = 0;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        out[i] = depth;
        if (degrees_[i] > 0) {
            pending.push_back(degrees_[i]);
            ++depth;
        } else {
            while (!pending.empty() && --pending.back() == 0) {
                pending.pop_back();
                --depth;
            }
        }
    }
    return out;
}

std::vector<std::int64_t> Tree::parent_indices() const {
    std::vector<std::int64_t> out(degrees_.size(), -1);
    std::vector<std::pair<std::int64_t, std::int64_t>> stack;  // (index, remaining children)
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (!stack.empty()) {
            out[i] = stack.back().first;
            if (--stack.back().second == 0) stack.pop_back();
        }
        if (degrees_[i] > 0) stack.push_back({static_cast<std::int64_t>(i), degrees_[i]});
    }
    return out;
}

std::vector<std::int64_t> Tree::subtree_sizes() const {
    std::vector<std::int64_t> parent = parent_indices();
    std::vector<std::int64_t> size(degrees_.size(), 1);
    for (std::size_t i = degrees_.size(); i-- > 1;) size[parent[i]] += size[i];
    return size;
}

std::int64_t Tree::count_outdegree(const DegreeSet& set) const {
    if (set.trivially_empty()) throw EmptySet("count_outdegree over an empty degree set");
    std::int64_t n = 0;
    for (std::int64_t k : degrees_) n += set.contains(k) ? 1 : 0;
    return n;
}

std::int64_t Tree::generation_size(std::int64_t n) const {
    if (n < 0) throw DomainError("generation index must be >= 0");
    std::int64_t count = 0;
    for (std::int64_t d : depths()) count += (d == n) ? 1 : 0;
    return count;
}

std::vector<NodeLabel> Tree::labels() const {
    std::vector<NodeLabel> out;
    out.reserve(degrees_.size());
    std::vector<std::int64_t> path;
    std::vector<std::pair<std::int64_t, std::int64_t>> stack;  // (emitted children, degree)
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        out.emplace_back(std::vector<std::int64_t>(path));
        if (degrees_[i] > 0) {
            stack.push_back({0, degrees_[i]});
            path.push_back(1);
        } else {
            while (!stack.empty() && stack.back().first + 1 == stack.back().second) {
                stack.pop_back();
                path.pop_back();
            }
            if (!stack.empty()) {
                ++stack.back().first;
                ++path.back();
            }
        }
    }
    return out;
}

std::optional<std::size_t> Tree::index_of(const NodeLabel& label) const {
    // Walk the encoding once, descending along the label's path.
    std::size_t idx = 0;
    std::vector<std::int64_t> sizes = subtree_sizes();
    for (std::int64_t step : label.path()) {
        if (degrees_[idx] < step) return std::nullopt;
        std::size_t child = idx + 1;
        for (std::int64_t s = 1; s < step; ++s) child += sizes[child];
        idx = child;
    }
    return idx;
}

bool Tree::is_leaf(const NodeLabel& label) const {
    auto idx = index_of(label);
    return idx && degrees_[*idx] == 0;
}

std::string Tree::to_parens() const {
    std::string out;
    std::vector<std::int64_t> pending;
    for (std::int64_t k : degrees_) {
        out += '(';
        if (k > 0) {
            pending.push_back(k);
        } else {
            out += ')';
            while (!pending.empty() && --pending.back() == 0) {
                pending.pop_back();
                out += ')';
            }
        }
    }
    return out;
}

RestrictedTree::RestrictedTree(Tree tree, std::int64_t cap) : tree_(std::move(tree)), cap_(cap) {
    if (cap < 0) throw DomainError("height cap must be >= 0");
    if (tree_.height() > cap) throw DomainError("tree exceeds its height cap");
}

RestrictedTree restrict_tree(const Tree& t, std::int64_t h) {
    if (h < 0) throw DomainError("height cap must be >= 0");
    std::vector<std::int64_t> depths = t.depths();
    std::vector<std::int64_t> out;
    out.reserve(t.card());
    for (std::size_t i = 0; i < t.card(); ++i) {
        if (depths[i] > h) continue;
        out.push_back(depths[i] == h ? 0 : t.degrees()[i]);
    }
    return RestrictedTree(Tree::decode(std::move(out)), h);
}

Tree graft(const Tree& t, const NodeLabel& x, const Tree& s) {
    auto idx = t.index_of(x);
    if (!idx) throw NotALeaf("graft point " + x.to_string() + " not in tree");
    if (t.degrees()[*idx] != 0) throw NotALeaf("graft point " + x.to_string() + " is internal");
    std::vector<std::int64_t> out;
    out.reserve(t.card() + s.card() - 1);
    out.insert(out.end(), t.degrees().begin(), t.degrees().begin() + *idx);
    out.insert(out.end(), s.degrees().begin(), s.degrees().end());
    out.insert(out.end(), t.degrees().begin() + *idx + 1, t.degrees().end());
    return Tree::decode(std::move(out));
}

}  // namespace gwt
