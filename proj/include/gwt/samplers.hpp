#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwt/events.hpp"
#include "gwt/offspring.hpp"
#include "gwt/rng.hpp"
#include "gwt/tree.hpp"

namespace gwt {

// Node and rejection limits for one draw.  max_nodes bounds a single tree;
// max_rejections bounds conditioned retries.
struct SamplerBudget {
    static constexpr std::uint64_t kUnlimitedNodes = ~std::uint64_t{0};
    std::uint64_t max_nodes = kUnlimitedNodes;
    std::uint64_t max_rejections = 1000000;

    bool unlimited_nodes() const { return max_nodes == kUnlimitedNodes; }
};

// One draw from the unconditioned law, preorder degree by degree.
// BudgetExceeded once the node count would pass max_nodes; with an unlimited
// budget a strictly supercritical law is refused up front, since the draw
// then fails to halt with positive probability.
Tree sample_gw(const OffspringDistribution& p, SplitMix64& rng,
               const SamplerBudget& budget = {});

// Height-restricted draw: degrees from p strictly below the cap, zero at it.
RestrictedTree sample_gw_restricted(const OffspringDistribution& p, std::int64_t h,
                                    SplitMix64& rng, const SamplerBudget& budget = {});

// Spine tree prefix: the restriction at height h plus the spine child
// indices V_1..V_h (1-based).  Spine nodes reproduce by the size-biased law,
// the spine child is uniform among their children, everything off the spine
// is an independent restricted draw.
struct KestenPrefix {
    KestenPrefix(RestrictedTree tree, std::vector<std::int64_t> spine);
    const RestrictedTree& tree() const { return tree_; }
    const std::vector<std::int64_t>& spine() const { return spine_; }
    std::vector<NodeLabel> spine_labels() const;

  private:
    RestrictedTree tree_;
    std::vector<std::int64_t> spine_;
};
KestenPrefix sample_kesten(const OffspringDistribution& p, std::int64_t h, SplitMix64& rng,
                           const SamplerBudget& budget = {});

// Rejection draw from the conditional law given the event.  A finite node
// budget is only accepted when it provably cannot clip a matching tree
// (certified card bound <= max_nodes); otherwise InconsistentBudget.
// Overflowing draws then count as ordinary rejections.
struct ConditionedDraw {
    Tree tree = Tree::leaf();
    std::uint64_t attempts = 0;   // total draws including the accepted one
    std::uint64_t overflows = 0;  // draws discarded at the node budget
};
ConditionedDraw sample_conditioned(const OffspringDistribution& p, const EventSpec& event,
                                   SplitMix64& rng, const SamplerBudget& budget = {});

// Exact fixed-size draw: n i.i.d. degrees conditioned (by rejection) on
// summing to n-1, then rotated to the unique valid encoding.  The rotation
// starts right after the first attainment of the running minimum.
Tree sample_progeny_exact(const OffspringDistribution& p, std::int64_t n, SplitMix64& rng,
                          std::uint64_t max_attempts = 10000000);

// Estimate of a probability with its provenance.
struct QValue {
    double value = 0.0;
    double std_error = 0.0;  // 0 for exact methods
    std::string method;
    std::uint64_t samples = 0;
};

// q = P(some node's degree falls in the set), by simulating the absorbed
// total-progeny walk on independent substreams of (seed, replicate).
QValue estimate_q_monte_carlo(const OffspringDistribution& p, const DegreeSet& set,
                              std::uint64_t replicates, std::uint64_t seed,
                              std::uint64_t step_cap = 1 << 20);
// Same probability from the exact first-passage recursion.
QValue exact_q(const OffspringDistribution& p, const DegreeSet& set);

// Leaf-count offspring variable: X_0 = sum of N-1 copies of (X-1 | X >= 1)
// with N geometric(p(0)).
std::int64_t sample_X0(const OffspringDistribution& p, SplitMix64& rng);

// General mark-count offspring variable: run the walk to the first degree in
// the set (retrying runs that die first), then thin the pending count
// binomially with the supplied q.
std::int64_t sample_XA(const OffspringDistribution& p, const DegreeSet& set, const QValue& q,
                       SplitMix64& rng, std::uint64_t max_attempts = 1000000,
                       std::uint64_t step_cap = 1 << 20);
// Convenience overload computing q exactly first.
std::int64_t sample_XA(const OffspringDistribution& p, const DegreeSet& set, SplitMix64& rng);

}  // namespace gwt
