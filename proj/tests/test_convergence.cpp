#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gwt/convergence.hpp"
#include "gwt/errors.hpp"
#include "gwt/events.hpp"
#include "gwt/exact.hpp"
#include "gwt/offspring.hpp"
#include "gwt/parallel.hpp"
#include "gwt/pmf.hpp"
#include "gwt/tree.hpp"

using namespace gwt;
using doctest::Approx;

namespace {

Tree t(std::vector<std::int64_t> degrees) { return Tree::decode(std::move(degrees)); }

OffspringDistribution binary() { return OffspringDistribution::from_pmf({0.5, 0.0, 0.5}); }
OffspringDistribution subcritical() { return OffspringDistribution::from_pmf({0.6, 0.0, 0.4}); }

}  // namespace

TEST_CASE("height-tail ratios approach the offspring mean") {
    // Geometric mixture q = 1/2: P(H >= n) = 1/(n+1), so the ratio at n is
    // (n+1)/(n+2) exactly.
    auto g = OffspringDistribution::geometric_mixture(0.5);
    auto rep = ratio_sequence(g, EventSpec::height_at_least(1), 1, 50, 1);
    CHECK(rep.target == Approx(1.0).epsilon(1e-12));
    CHECK(!rep.family.empty());
    for (const auto& pt : rep.points)
        CHECK(pt.ratio == Approx((pt.n + 1.0) / (pt.n + 2.0)).epsilon(1e-12));
    CHECK(!rep.converged);  // 1/52 is still above 1%
    auto rep2 = ratio_sequence(g, EventSpec::height_at_least(1), 1, 1000, 111);
    CHECK(rep2.converged);
    CHECK(rep2.final_distance < 0.01);
    CHECK(rep2.points.back().n == 1000);

    // Subcritical tails: the ratio approaches the mean 0.8 quickly.
    auto srep = ratio_sequence(subcritical(), EventSpec::height_at_least(1), 1, 200, 10);
    CHECK(srep.target == Approx(0.8).epsilon(1e-12));
    CHECK(srep.converged);
    CHECK(std::fabs(srep.points.back().ratio - 0.8) < 0.01);

    // Height atoms behave like the tails.
    auto arep = ratio_sequence(subcritical(), EventSpec::height_exactly(1), 1, 150, 10);
    CHECK(std::fabs(arep.points.back().ratio - 0.8) < 0.01);
}

TEST_CASE("size-window ratios on the span lattice") {
    // Window width 2 always captures exactly one odd size for the binary
    // law, so the ratio is P(Card = n+2)/P(Card = n) -> 1.
    auto rep = ratio_sequence(binary(), EventSpec::card_window(1, 2), 1, 301, 50);
    CHECK(rep.target == Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(rep.points.back().ratio - 1.0) < 0.05);
    // Ratios climb toward 1 from below: (n/(n+2))^{3/2} asymptotics.
    CHECK(rep.points.front().ratio < rep.points.back().ratio);

    // A width-1 window straddles the lattice gap somewhere: refused.
    CHECK_THROWS_AS(ratio_sequence(binary(), EventSpec::card_window(1, 1), 1, 9, 1),
                    ZeroMassEvent);
    CHECK_THROWS_AS(ratio_sequence(binary(), EventSpec::card_window(1, 2), 0, 9, 1), DomainError);
    CHECK_THROWS_AS(
        ratio_sequence(binary(), EventSpec::generation_size(2, 1), 1, 9, 1), DomainError);
}

TEST_CASE("mark-count window ratios") {
    // Leaf counts of the binary tree: one leaf more means two nodes more,
    // and the transformed size law is again critical.
    auto rep = ratio_sequence(binary(), EventSpec::mark_count(DegreeSet::of({0}), 1), 1, 60, 10);
    CHECK(rep.target == Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(rep.points.back().ratio - 1.0) < 0.05);
}

TEST_CASE("exact restriction distance: hand-checked values") {
    auto b = binary();

    // Card = 1 pins the leaf, which never appears under the spine law.
    auto tv1 = tv_at_height_exact(b, EventSpec::card_exactly(1), 1, 5);
    CHECK(tv1.tv == Approx(1.0).epsilon(1e-12));
    CHECK(tv1.method == "exact");
    CHECK(tv1.samples == 0);
    CHECK(tv1.std_error == 0.0);

    // Card = 3 at cap 1 is the cherry, which is also the whole spine law.
    auto tv3 = tv_at_height_exact(b, EventSpec::card_exactly(3), 1, 5);
    CHECK(tv3.tv == Approx(0.0).epsilon(1e-12));
    CHECK(tv3.unobserved_kesten == Approx(0.0).epsilon(1e-12));

    // Card = 3 at cap 2: the conditioned tree dies before the cap while the
    // spine always reaches it.
    auto tv3b = tv_at_height_exact(b, EventSpec::card_exactly(3), 2, 5);
    CHECK(tv3b.tv == Approx(1.0).epsilon(1e-12));

    // Card = 5 at cap 2: both shapes get 1/2 conditioned vs 1/4 under the
    // spine law, and half the spine mass lives on taller shapes.
    auto tv5 = tv_at_height_exact(b, EventSpec::card_exactly(5), 2, 7);
    CHECK(tv5.tv == Approx(0.5).epsilon(1e-12));
    CHECK(tv5.unobserved_kesten == Approx(0.5).epsilon(1e-12));
    REQUIRE(tv5.top.size() >= 2);
    CHECK(tv5.top[0].conditioned == Approx(0.5).epsilon(1e-12));
    CHECK(tv5.top[0].kesten == Approx(0.25).epsilon(1e-12));

    // Card = 9 at cap 2: 3/14 by direct computation.
    auto tv9 = tv_at_height_exact(b, EventSpec::card_exactly(9), 2, 11);
    CHECK(tv9.tv == Approx(3.0 / 14.0).epsilon(1e-12));

    // Two leaves force the cherry at cap 1: distance zero again.
    auto tvm = tv_at_height_exact(b, EventSpec::mark_count(DegreeSet::of({0}), 2), 1, 7);
    CHECK(tvm.tv == Approx(0.0).epsilon(1e-12));

    // Point Card events off the lattice snap instead of failing; an
    // impossible generation size has no rescue.
    auto snapped = tv_at_height_exact(b, EventSpec::card_exactly(2), 1, 5);
    CHECK((snapped.tv == Approx(1.0).epsilon(1e-12) ||
           snapped.tv == Approx(0.0).epsilon(1e-12)));  // snapped to Card 1 or 3
    CHECK_THROWS_AS(tv_at_height_exact(b, EventSpec::generation_size(1, 3), 1, 5),
                    ZeroMassEvent);
}

TEST_CASE("sampled restriction distance tracks the exact one") {
    auto b = binary();
    auto exact = tv_at_height_exact(b, EventSpec::card_exactly(9), 2, 11);
    auto mc = tv_at_height_mc(b, EventSpec::card_exactly(9), 2, 200000, 17);
    CHECK(mc.method == "monte_carlo");
    CHECK(mc.samples == 200000);
    CHECK(mc.std_error == Approx(0.5 / std::sqrt(200000.0)).epsilon(1e-12));
    CHECK(std::fabs(mc.tv - exact.tv) < 0.01);

    // Same seed, same answer; fresh seed, almost surely different.
    auto mc2 = tv_at_height_mc(b, EventSpec::card_exactly(9), 2, 20000, 17);
    auto mc3 = tv_at_height_mc(b, EventSpec::card_exactly(9), 2, 20000, 17);
    auto mc4 = tv_at_height_mc(b, EventSpec::card_exactly(9), 2, 20000, 18);
    CHECK(mc2.tv == mc3.tv);
    CHECK(mc2.tv != mc4.tv);

    // Mark-count events run through the budgeted rejection sampler.
    auto exact_m = tv_at_height_exact(b, EventSpec::mark_count(DegreeSet::of({0}), 3), 1, 9);
    auto mc_m = tv_at_height_mc(b, EventSpec::mark_count(DegreeSet::of({0}), 3), 1, 50000, 19);
    CHECK(std::fabs(mc_m.tv - exact_m.tv) < 0.02);
}

TEST_CASE("spine sampler distance to its own exact law") {
    auto b = binary();
    auto rep = kesten_sampler_tv(b, 2, 40000, 23);
    CHECK(rep.method == "monte_carlo");
    CHECK(rep.tv < 0.02);
    auto g = OffspringDistribution::geometric_mixture(0.5);
    auto grep = kesten_sampler_tv(g, 1, 40000, 24);
    CHECK(grep.tv < 0.02);
}

TEST_CASE("conditional root law given a far generation size, h = 1") {
    // Independent oracle: weight p(k) by the k-fold convolution of the
    // closed-form generation law one step down, then compare to the spine
    // root law.
    double q = 0.5;
    std::int64_t n = 3, alpha = 2;
    auto g = OffspringDistribution::geometric_mixture(q);
    auto below = generation_size_pmf(g, n - 1, 128);
    const std::int64_t kTop = 24;
    std::vector<double> weights(kTop + 1, 0.0);  // ~ P(root = k | G_n = alpha)
    std::vector<double> conv{1.0};               // k-fold convolution of `below`
    double total = 0.0;
    for (std::int64_t k = 0; k <= kTop; ++k) {
        double at_alpha = alpha < static_cast<std::int64_t>(conv.size())
                              ? conv[static_cast<std::size_t>(alpha)]
                              : 0.0;
        weights[static_cast<std::size_t>(k)] = g(k) * at_alpha;
        total += weights[static_cast<std::size_t>(k)];
        conv = convolve_serial(conv, below.values);
    }
    auto rep = tv_generation_exact_h1(q, n, alpha);
    CHECK(rep.method == "exact");
    auto sb = g.size_biased();
    double tv = 0.0, sb_seen = 0.0;
    for (std::int64_t k = 1; k <= kTop; ++k) {
        tv += 0.5 * std::fabs(weights[static_cast<std::size_t>(k)] / total - sb(k));
        sb_seen += sb(k);
    }
    tv += 0.5 * (1.0 - sb_seen);  // spine mass beyond kTop, conditional mass there ~ 0
    CHECK(rep.tv == Approx(tv).epsilon(1e-8));

    // Tracking alpha = n, the distance shrinks with n.
    double last = 1.0;
    for (std::int64_t m : {2, 4, 8, 16}) {
        auto r = tv_generation_exact_h1(q, m, m);
        CHECK(r.tv < last);
        last = r.tv;
    }
    CHECK(last < 0.15);

    CHECK_THROWS_AS(tv_generation_exact_h1(q, 0, 1), DomainError);
    CHECK_THROWS_AS(tv_generation_exact_h1(q, 3, 0), DomainError);
}

TEST_CASE("hypothesis ratio for the slowly varying comparison") {
    // q = 1/2: P(G_n = 1) = 1/(n+1)^2, so the n = 2, j = 1 ratio is 9/4.
    CHECK(condzn_ratio(0.5, 2, 1, 1) == Approx(2.25).epsilon(1e-12));
    // Slowly growing alpha: the ratio settles at 1.
    CHECK(condzn_ratio(0.5, 1000, 1, 1) == Approx(1.0).epsilon(0.01));
    CHECK(condzn_ratio(0.5, 1000, 3, 40) == Approx(1.0).epsilon(0.05));
    // Fast-growing alpha destroys the comparison: the ratio collapses.
    CHECK(condzn_ratio(0.5, 20, 1, 8000) < 1e-3);

    CHECK_THROWS_AS(condzn_ratio(0.5, 5, 0, 1), DomainError);
    CHECK_THROWS_AS(condzn_ratio(0.5, 5, 5, 1), DomainError);
}

TEST_CASE("graft shift of each functional") {
    Tree base = t({2, 2, 0, 0, 0});
    auto leaves = std::vector<NodeLabel>{NodeLabel({1, 1}), NodeLabel({1, 2}), NodeLabel({2})};

    CHECK(shift_constant(EventSpec::height_at_least(3), base, NodeLabel({1, 2})) == 2);
    CHECK(shift_constant(EventSpec::height_at_least(3), base, NodeLabel({2})) == 1);
    CHECK(shift_constant(EventSpec::card_exactly(9), base, NodeLabel({2})) == 4);
    CHECK(shift_constant(EventSpec::mark_count(DegreeSet::of({0}), 3), base, NodeLabel({2})) ==
          2);
    CHECK(shift_constant(EventSpec::mark_count(DegreeSet::of({2}), 1), base, NodeLabel({2})) ==
          2);
    CHECK_THROWS_AS(shift_constant(EventSpec::card_exactly(3), base, NodeLabel({1})), NotALeaf);
    CHECK_THROWS_AS(shift_constant(EventSpec::generation_size(2, 1), base, NodeLabel({2})),
                    DomainError);

    // The constant is exact under grafting for size and mark counts, and
    // exact for height once the graft dominates.
    for (const auto& [tree, prob] : enumerate_trees(binary(), 7)) {
        (void)prob;
        for (const NodeLabel& x : tree.labels()) {
            if (!tree.is_leaf(x)) continue;
            for (auto s : {t({0}), t({2, 0, 0}), t({2, 2, 0, 0, 0})}) {
                Tree grafted = graft(tree, x, s);
                auto card_event = EventSpec::card_exactly(1);
                CHECK(card_event.value_of(grafted) ==
                      card_event.value_of(s) + shift_constant(card_event, tree, x));
                for (auto set : {DegreeSet::of({0}), DegreeSet::of({2})}) {
                    auto mark_event = EventSpec::mark_count(set, 1);
                    CHECK(mark_event.value_of(grafted) ==
                          mark_event.value_of(s) + shift_constant(mark_event, tree, x));
                }
                auto height_event = EventSpec::height_at_least(1);
                std::int64_t shifted =
                    height_event.value_of(s) + shift_constant(height_event, tree, x);
                CHECK(height_event.value_of(grafted) >= height_event.value_of(tree));
                if (shifted >= height_event.value_of(tree))
                    CHECK(height_event.value_of(grafted) == shifted);
            }
        }
    }
}

TEST_CASE("observed shift lattice") {
    CHECK(observed_shift_gcd(binary(), EventSpec::card_exactly(1), 9) == 2);
    CHECK(observed_shift_gcd(binary(), EventSpec::height_at_least(1), 9) == 1);
    CHECK(observed_shift_gcd(binary(), EventSpec::mark_count(DegreeSet::of({0}), 1), 9) == 1);
    // Geometric supports size steps of 1.
    CHECK(observed_shift_gcd(OffspringDistribution::geometric_mixture(0.5),
                             EventSpec::card_exactly(1), 7, 500000) == 1);
}

TEST_CASE("conditional laws are invariant across the tilted family") {
    // theta = 1 compares the law with itself.
    auto r1 = tilt_invariance_check(subcritical(), DegreeSet::of({0}), {1.0}, 2, 9);
    REQUIRE(r1.rows.size() == 1);
    CHECK(r1.rows[0].discrepancy == 0.0);
    CHECK(r1.rows[0].slice_size > 0);

    // Substantive tilts on the two-atom base.
    auto r2 = tilt_invariance_check(subcritical(), DegreeSet::of({0}), {0.8, 1.1, 2.0}, 2, 11);
    CHECK(r2.rows.size() == 3);
    CHECK(r2.max_discrepancy <= 1e-12);
    auto r3 =
        tilt_invariance_check(subcritical(), DegreeSet::naturals(), {std::sqrt(1.5)}, 5, 11);
    CHECK(r3.max_discrepancy <= 1e-12);
    auto r4 = tilt_invariance_check(subcritical(), DegreeSet::of({2}), {0.8, 1.1}, 1, 11);
    CHECK(r4.max_discrepancy <= 1e-12);

    // Mixed-degree base: slices hold many shapes of different sizes and
    // probabilities, so the cancellation is no longer trivial.
    auto mixed = OffspringDistribution::from_pmf({0.5, 0.2, 0.3});
    auto r5 = tilt_invariance_check(mixed, DegreeSet::of({0}), {0.9, 1.1}, 2, 9, 500000);
    CHECK(r5.rows[0].slice_size > 10);
    CHECK(r5.max_discrepancy <= 1e-12);

    CHECK_THROWS_AS(tilt_invariance_check(binary(), DegreeSet::naturals(), {1.0}, 2, 9),
                    ZeroMassEvent);
}
