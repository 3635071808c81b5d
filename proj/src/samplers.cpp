#include "gwt/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gwt/exact.hpp"
#include "gwt/parallel.hpp"

namespace gwt {

namespace {

constexpr double kMeanSlack = 1e-9;

// Preorder draw; nullopt once the node count passes the cap.
std::optional<std::vector<std::int64_t>> draw_degrees(const OffspringDistribution& p,
                                                      SplitMix64& rng, std::uint64_t max_nodes) {
    std::vector<std::int64_t> seq;
    std::int64_t open = 1;
    while (open > 0) {
        if (static_cast<std::uint64_t>(seq.size()) >= max_nodes) return std::nullopt;
        std::int64_t k = p.sample(rng);
        seq.push_back(k);
        open += k - 1;
    }
    return seq;
}

}  // namespace

Tree sample_gw(const OffspringDistribution& p, SplitMix64& rng, const SamplerBudget& budget) {
    if (budget.unlimited_nodes() && p.mean() > 1.0 + kMeanSlack)
        throw Supercritical("unlimited draw from a supercritical law cannot be guaranteed to halt");
    auto seq = draw_degrees(p, rng, budget.max_nodes);
    if (!seq) throw BudgetExceeded("tree passed the node budget while still growing");
    return Tree::decode(std::move(*seq));
}

RestrictedTree sample_gw_restricted(const OffspringDistribution& p, std::int64_t h,
                                    SplitMix64& rng, const SamplerBudget& budget) {
    if (h < 0) throw DomainError("restriction height must be nonnegative");
    std::vector<std::int64_t> seq;
    // Preorder with explicit depth stack; nodes at the cap close immediately.
    std::vector<std::int64_t> depths = {0};
    while (!depths.empty()) {
        if (static_cast<std::uint64_t>(seq.size()) >= budget.max_nodes)
            throw BudgetExceeded("restricted tree passed the node budget");
        std::int64_t d = depths.back();
        depths.pop_back();
        std::int64_t k = (d == h) ? 0 : p.sample(rng);
        seq.push_back(k);
        for (std::int64_t c = 0; c < k; ++c) depths.push_back(d + 1);
    }
    return RestrictedTree(Tree::decode(std::move(seq)), h);
}

KestenPrefix::KestenPrefix(RestrictedTree tree, std::vector<std::int64_t> spine)
    : tree_(std::move(tree)), spine_(std::move(spine)) {
    if (static_cast<std::int64_t>(spine_.size()) != tree_.cap())
        throw DomainError("spine length must equal the restriction cap");
    NodeLabel at;
    for (std::int64_t v : spine_) {
        auto idx = tree_.tree().index_of(at);
        if (!idx) throw DomainError("spine leaves the tree");
        std::int64_t deg = tree_.tree().degrees()[*idx];
        if (v < 1 || v > deg) throw DomainError("spine child index exceeds the node degree");
        at = at.child(v);
    }
    if (!tree_.tree().index_of(at)) throw DomainError("spine leaves the tree");
}

std::vector<NodeLabel> KestenPrefix::spine_labels() const {
    std::vector<NodeLabel> out;
    NodeLabel at;
    out.push_back(at);
    for (std::int64_t v : spine_) {
        at = at.child(v);
        out.push_back(at);
    }
    return out;
}

KestenPrefix sample_kesten(const OffspringDistribution& p, std::int64_t h, SplitMix64& rng,
                           const SamplerBudget& budget) {
    if (h < 0) throw DomainError("restriction height must be nonnegative");
    if (p.mean() > 1.0 + kMeanSlack) throw Supercritical("spine tree needs mean offspring <= 1");
    OffspringDistribution biased = p.size_biased();

    std::vector<std::int64_t> seq;
    std::vector<std::int64_t> spine;
    spine.reserve(static_cast<std::size_t>(h));

    // Off-spine subtree rooted at depth d, preorder.
    auto grow_plain = [&](auto&& self, std::int64_t d) -> void {
        if (static_cast<std::uint64_t>(seq.size()) >= budget.max_nodes)
            throw BudgetExceeded("spine prefix passed the node budget");
        std::int64_t k = (d == h) ? 0 : p.sample(rng);
        seq.push_back(k);
        for (std::int64_t c = 0; c < k; ++c) self(self, d + 1);
    };
    // Spine node at depth d: size-biased degree, uniform spine child.
    auto grow_spine = [&](auto&& self, std::int64_t d) -> void {
        if (static_cast<std::uint64_t>(seq.size()) >= budget.max_nodes)
            throw BudgetExceeded("spine prefix passed the node budget");
        if (d == h) {
            seq.push_back(0);
            return;
        }
        std::int64_t k = biased.sample(rng);
        std::int64_t v = rng.next_index(k);
        seq.push_back(k);
        spine.push_back(v);
        for (std::int64_t c = 1; c <= k; ++c) {
            if (c == v)
                self(self, d + 1);
            else
                grow_plain(grow_plain, d + 1);
        }
    };
    grow_spine(grow_spine, 0);
    return KestenPrefix(RestrictedTree(Tree::decode(std::move(seq)), h), std::move(spine));
}

ConditionedDraw sample_conditioned(const OffspringDistribution& p, const EventSpec& event,
                                   SplitMix64& rng, const SamplerBudget& budget) {
    if (budget.unlimited_nodes()) {
        if (p.mean() > 1.0 + kMeanSlack)
            throw Supercritical(
                "unlimited draw from a supercritical law cannot be guaranteed to halt");
    } else {
        auto bound = event.card_bound(p);
        if (!bound)
            throw InconsistentBudget("event " + event.to_string() +
                                     " has no certified size bound; a finite node budget could "
                                     "clip matching trees");
        if (static_cast<std::uint64_t>(*bound) > budget.max_nodes)
            throw InconsistentBudget("node budget is below the certified event size bound");
    }
    ConditionedDraw out;
    while (out.attempts < budget.max_rejections) {
        ++out.attempts;
        auto seq = draw_degrees(p, rng, budget.max_nodes);
        if (!seq) {
            // Certified above: an overflowing tree cannot match the event.
            ++out.overflows;
            continue;
        }
        Tree t = Tree::decode(std::move(*seq));
        if (event.matches(t)) {
            out.tree = std::move(t);
            return out;
        }
    }
    throw RejectionBudgetExceeded("no match for " + event.to_string() + " in " +
                                  std::to_string(budget.max_rejections) + " draws");
}

Tree sample_progeny_exact(const OffspringDistribution& p, std::int64_t n, SplitMix64& rng,
                          std::uint64_t max_attempts) {
    if (n < 1) throw DomainError("tree size must be positive");
    std::int64_t d = p.span();
    if (n == 1 && p(0) <= 0.0) throw LatticeMiss("size 1 needs an atom at degree 0");
    if (d == 0) {
        if (n != 1) throw LatticeMiss("law concentrated at degree 0 only reaches size 1");
    } else if ((n - 1) % d != 0) {
        throw LatticeMiss("size off the span lattice d m + 1");
    }
    std::vector<std::int64_t> x(static_cast<std::size_t>(n));
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::int64_t total = 0;
        for (auto& xi : x) {
            xi = p.sample(rng);
            total += xi;
        }
        if (total != n - 1) continue;
        // Cycle lemma: exactly one rotation is a valid encoding; it starts
        // right after the first attainment of the running minimum.
        std::int64_t run = 0, best = 1, start = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            run += x[static_cast<std::size_t>(i)] - 1;
            if (run < best) {
                best = run;
                start = i + 1;
            }
        }
        std::vector<std::int64_t> seq;
        seq.reserve(x.size());
        for (std::int64_t i = 0; i < n; ++i)
            seq.push_back(x[static_cast<std::size_t>((start + i) % n)]);
        return Tree::decode(std::move(seq));
    }
    throw RejectionBudgetExceeded("degree sums kept missing n-1");
}

QValue estimate_q_monte_carlo(const OffspringDistribution& p, const DegreeSet& set,
                              std::uint64_t replicates, std::uint64_t seed,
                              std::uint64_t step_cap) {
    if (set.trivially_empty()) throw EmptyMark("mark set has no degrees");
    if (replicates == 0) throw DomainError("q estimate needs at least one replicate");
    auto hist = mc_histogram<int>(replicates, seed, [&](SplitMix64& r) -> int {
        std::int64_t v = 1;
        for (std::uint64_t step = 0; step < step_cap; ++step) {
            std::int64_t k = p.sample(r);
            if (set.contains(k)) return 1;
            v += k - 1;
            if (v == 0) return 0;
        }
        return 0;  // capped walks count as failures
    });
    double hits = static_cast<double>(hist.count(1) ? hist.at(1) : 0);
    double m = static_cast<double>(replicates);
    QValue q;
    q.value = hits / m;
    q.std_error = std::sqrt(std::max(0.0, q.value * (1.0 - q.value) / m));
    q.method = "walk_monte_carlo";
    q.samples = replicates;
    return q;
}

QValue exact_q(const OffspringDistribution& p, const DegreeSet& set) {
    MarkOffspring mo = mark_offspring(p, set);
    QValue q;
    q.value = mo.q;
    q.std_error = 0.0;
    q.method = "first_passage_recursion";
    q.samples = 0;
    return q;
}

std::int64_t sample_X0(const OffspringDistribution& p, SplitMix64& rng) {
    double p0 = p(0);
    if (p0 <= 0.0) throw DomainError("leaf offspring variable needs an atom at degree 0");
    // N geometric(p(0)), then N-1 summands distributed as X-1 given X >= 1.
    std::int64_t n = 1;
    while (!rng.next_bernoulli(p0)) ++n;
    std::int64_t total = 0;
    for (std::int64_t i = 1; i < n; ++i) {
        std::int64_t z;
        do {
            z = p.sample(rng);
        } while (z < 1);
        total += z - 1;
    }
    return total;
}

std::int64_t sample_XA(const OffspringDistribution& p, const DegreeSet& set, const QValue& q,
                       SplitMix64& rng, std::uint64_t max_attempts, std::uint64_t step_cap) {
    if (set.trivially_empty()) throw EmptyMark("mark set has no degrees");
    if (p.mass_of(set) <= 0.0) throw EmptyMark("mark set carries no offspring mass");
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::int64_t v = 1;
        for (std::uint64_t step = 0; step < step_cap; ++step) {
            std::int64_t k = p.sample(rng);
            if (set.contains(k)) {
                std::int64_t pending = v - 1 + k;
                if (q.value >= 1.0) return pending;
                std::int64_t kept = 0;
                for (std::int64_t i = 0; i < pending; ++i)
                    if (rng.next_bernoulli(q.value)) ++kept;
                return kept;
            }
            v += k - 1;
            if (v == 0) break;  // walk died unmarked: retry
        }
    }
    throw RejectionBudgetExceeded("walk kept dying before any marked degree");
}

std::int64_t sample_XA(const OffspringDistribution& p, const DegreeSet& set, SplitMix64& rng) {
    return sample_XA(p, set, exact_q(p, set), rng);
}

}  // namespace gwt
