#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gwt/events.hpp"
#include "gwt/offspring.hpp"
#include "gwt/pmf.hpp"
#include "gwt/tree.hpp"

namespace gwt {

// Probability that an unconditioned tree equals t: product of p(k_u) over
// all nodes.
double tree_probability(const OffspringDistribution& p, const Tree& t);

// Probability that the restriction at height h equals t: product of p(k_u)
// over generations strictly below h.  Requires height(t) <= h.
double restriction_probability(const OffspringDistribution& p, const Tree& t, std::int64_t h);

// Probability that the size-biased spine tree restricted at its cap equals
// the given prefix: (generation size at cap) * mean^{-cap} * restriction
// probability.  Supercritical when mean > 1.
double kesten_restriction_probability(const OffspringDistribution& p, const RestrictedTree& rt);

// Total-progeny law of a forest of k independent trees, indices 0..n_max:
//   P(total = n) = (k/n) P(X_1 + ... + X_n = n - k).
// Convolution supports are cut where cumulative mass reaches 1 - 1e-13; the
// cut only ever removes upper-tail entries, so returned entries are exact up
// to rounding.
PMFVector dwass_pmf(const OffspringDistribution& p, std::int64_t k, std::int64_t n_max);

// tail[n] = P(height >= n), pmf[n] = P(height = n), n = 0..n_max.  The tail
// recursion runs in 1 - s space so subcritical tails stay accurate far below
// double cancellation range.
struct HeightLaws {
    std::vector<double> tail;  // length n_max + 2
    std::vector<double> pmf;   // length n_max + 1
};
HeightLaws height_laws(const OffspringDistribution& p, std::int64_t n_max);

// Closed forms for the geometric mixture p(0) = 1-q, p(k) = q^2 (1-q)^{k-1}
// with c = (1-q)/q:
//   phi_n(s) = (nc - (nc-1)s) / ((nc+1) - nc s)
//   P(G_n = k) = (nc)^{k-1} / (nc+1)^{k+1}   for k >= 1
double geometric_phi_n(double q, std::int64_t n, double s);
double geometric_generation_pmf(double q, std::int64_t n, std::int64_t k);
double log_geometric_generation_pmf(double q, std::int64_t n, std::int64_t k);

// Law of the generation-n size for a general offspring law, truncated at
// value_cap.  Exact for paths that never exceed the cap; the deficit column
// accounts for the rest.  BudgetExceeded when n * cap^2 is out of desk range.
PMFVector generation_size_pmf(const OffspringDistribution& p, std::int64_t n,
                              std::int64_t value_cap);

// All trees with degrees in the support of p and at most card_max nodes, in
// lexicographic encoding order, each with its probability.  Throws
// BudgetExceeded after `budget` emitted trees.
void enumerate_trees(const OffspringDistribution& p, std::int64_t card_max, std::uint64_t budget,
                     const std::function<void(const Tree&, double)>& fn);

struct EnumeratedTree {
    Tree tree;
    double probability;
};
std::vector<EnumeratedTree> enumerate_trees(const OffspringDistribution& p, std::int64_t card_max,
                                            std::uint64_t budget = 20000);

// All height-restricted trees of cap h (degrees in the support below the
// cap, zero at the cap) with their restriction probabilities.
void enumerate_restricted_trees(const OffspringDistribution& p, std::int64_t h,
                                std::uint64_t budget,
                                const std::function<void(const RestrictedTree&, double)>& fn);

// Offspring law of the tree that codes the marked nodes (out-degree in the
// set) of a tree conditioned to carry at least one mark, computed by an
// absorbing first-passage recursion on the total-progeny walk, then binomial
// thinning with q = P(mark set nonempty).
struct MarkOffspring {
    OffspringDistribution law;  // X_A
    PMFVector xtilde;           // law before thinning
    double q = 1.0;             // P(at least one marked node)
    double lost_mass = 0.0;     // DP truncation diagnostic
};
MarkOffspring mark_offspring(const OffspringDistribution& p, const DegreeSet& set,
                             std::int64_t value_cap = 512);

// Exact probability of the event under the unconditioned law, routed through
// dwass_pmf / height_laws / mark_offspring / generation_size_pmf.
double event_probability(const OffspringDistribution& p, const EventSpec& event);

// Exact conditional law of the height-h restriction given the event,
// computed by enumeration.  The event mass must be certified captured: when
// more than refuse_tol of it escapes the enumeration the call refuses
// rather than silently truncating.  Point Card events are snapped to the
// span lattice first (snapped_from reports the original index).
struct ConditionedLaw {
    std::map<Tree, double> law;  // keyed by restricted encoding
    std::int64_t h = 0;
    double event_mass = 0.0;  // exact P(event)
    double deficit = 0.0;     // relative event mass outside the enumeration
    std::optional<std::int64_t> snapped_from;
};
ConditionedLaw conditioned_restriction_law(const OffspringDistribution& p, EventSpec event,
                                           std::int64_t h, std::int64_t card_max,
                                           std::uint64_t budget = 20000,
                                           double refuse_tol = 1e-9);

}  // namespace gwt
