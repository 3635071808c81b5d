#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwt/events.hpp"
#include "gwt/offspring.hpp"
#include "gwt/tree.hpp"

namespace gwt {

// Successive-probability ratios of an event family indexed by n; the limit
// is the offspring mean.
struct RatioPoint {
    std::int64_t n = 0;
    double ratio = 0.0;
};
struct RatioReport {
    std::vector<RatioPoint> points;
    double target = 1.0;  // offspring mean
    double final_distance = 1.0;
    bool converged = false;
    double tolerance = 0.01;
    std::string family;
};

// ratio(n) = P(value in [n+1, n+1+width)) / P(value in [n, n+width)) with
// the prototype's width (nullopt compares the unbounded tails).  Families:
// Height, Card, OutDegreeCount.  ZeroMassEvent when a denominator vanishes.
RatioReport ratio_sequence(const OffspringDistribution& p, const EventSpec& prototype,
                           std::int64_t n_lo, std::int64_t n_hi, std::int64_t stride = 1,
                           double tolerance = 0.01);

// Total-variation distance at height h between the conditional law of the
// restriction and the spine tree law.
struct TVEntry {
    Tree tree = Tree::leaf();
    double conditioned = 0.0;
    double kesten = 0.0;
};
struct TVReport {
    std::int64_t h = 0;
    std::string event;
    double tv = 0.0;
    std::string method;  // "exact" or "monte_carlo"
    std::uint64_t samples = 0;
    double std_error = 0.0;          // bound, monte_carlo only
    double unobserved_kesten = 0.0;  // spine-law mass outside the support seen
    double deficit = 0.0;            // conditional mass not captured
    std::vector<TVEntry> top;        // heaviest restricted trees, at most 20
};

// Exact route via certified enumeration of the event slice.
TVReport tv_at_height_exact(const OffspringDistribution& p, const EventSpec& event,
                            std::int64_t h, std::int64_t card_max, std::uint64_t budget = 200000);

// Monte Carlo route: histogram of restricted draws from the conditional law
// (cycle-lemma sampler for point Card events, rejection otherwise) against
// the exact spine-law restriction probabilities.
TVReport tv_at_height_mc(const OffspringDistribution& p, const EventSpec& event, std::int64_t h,
                         std::uint64_t replicates, std::uint64_t seed,
                         std::uint64_t max_rejections_per_draw = 1000000);

// Fidelity of the spine sampler itself: empirical restriction law at height
// h against the exact one.
TVReport kesten_sampler_tv(const OffspringDistribution& p, std::int64_t h,
                           std::uint64_t replicates, std::uint64_t seed);

// Exact conditional-given-generation-size distance at h = 1 for the
// geometric family: the conditional root law is p(k) times the k-fold
// convolution of the previous generation's closed-form law.
TVReport tv_generation_exact_h1(double q, std::int64_t n, std::int64_t alpha);

// Closed-form hypothesis ratio P(G_{n-j} = alpha) / P(G_n = alpha) for the
// geometric family, evaluated in log space.
double condzn_ratio(double q, std::int64_t n, std::int64_t j, std::int64_t alpha);

// Additive-shift constant of the functional under grafting at leaf x:
// Height -> |x|, Card -> Card(t) - 1, OutDegreeCount -> L_A(t) - [0 in A].
// GenerationSize admits no scalar shift (DomainError).
std::int64_t shift_constant(const EventSpec& event, const Tree& t, const NodeLabel& x);

// gcd of the positive shift constants observed over all enumerated trees
// and leaves; 0 when none is positive.
std::int64_t observed_shift_gcd(const OffspringDistribution& p, const EventSpec& event,
                                std::int64_t card_max, std::uint64_t budget = 100000);

// Identity of conditional laws given the mark count across the tilted
// family: largest pointwise discrepancy over the enumerated slice.
struct TiltCheckRow {
    double theta = 1.0;
    double discrepancy = 0.0;
    std::uint64_t slice_size = 0;
};
struct TiltCheckReport {
    std::vector<TiltCheckRow> rows;
    double max_discrepancy = 0.0;
};
TiltCheckReport tilt_invariance_check(const OffspringDistribution& p, const DegreeSet& set,
                                      const std::vector<double>& thetas, std::int64_t n,
                                      std::int64_t card_max, std::uint64_t budget = 200000);

}  // namespace gwt
