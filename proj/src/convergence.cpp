#include "gwt/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gwt/compensated.hpp"
#include "gwt/exact.hpp"
#include "gwt/parallel.hpp"
#include "gwt/samplers.hpp"

namespace gwt {

namespace {

// Window mass [n, n+width) of a pmf over nonnegative indices, tail variant
// for an unbounded window given the total reachable mass.
double window_mass(const PMFVector& pmf, std::int64_t n, std::optional<std::int64_t> width,
                   double total) {
    NeumaierSum s;
    if (width) {
        for (std::int64_t m = std::max<std::int64_t>(n, 0); m < n + *width; ++m) s.add(pmf.at(m));
        return s.value();
    }
    for (std::int64_t m = 0; m < n; ++m) s.add(pmf.at(m));
    return total - s.value();
}

void finalize_ratio(RatioReport& r) {
    if (!r.points.empty()) {
        r.final_distance = std::fabs(r.points.back().ratio - r.target);
        r.converged = r.final_distance <= r.tolerance;
    }
}

// Shared tail of the TV computation once the conditional law (mass per
// restricted tree, summing to 1 - deficit) is known.
TVReport tv_against_kesten(const OffspringDistribution& p, std::int64_t h,
                           const std::map<Tree, double>& conditional, double deficit) {
    TVReport out;
    out.h = h;
    out.deficit = deficit;
    NeumaierSum half_l1, kesten_seen;
    for (const auto& [t, mass] : conditional) {
        double k = kesten_restriction_probability(p, RestrictedTree(t, h));
        half_l1.add(std::fabs(mass - k));
        kesten_seen.add(k);
        out.top.push_back({t, mass, k});
    }
    out.unobserved_kesten = std::max(0.0, 1.0 - kesten_seen.value());
    out.tv = 0.5 * half_l1.value() + 0.5 * out.unobserved_kesten;
    std::stable_sort(out.top.begin(), out.top.end(),
                     [](const TVEntry& a, const TVEntry& b) { return a.conditioned > b.conditioned; });
    if (out.top.size() > 20) out.top.resize(20);
    return out;
}

}  // namespace

RatioReport ratio_sequence(const OffspringDistribution& p, const EventSpec& prototype,
                           std::int64_t n_lo, std::int64_t n_hi, std::int64_t stride,
                           double tolerance) {
    if (n_lo < 1 || n_hi < n_lo || stride < 1) throw DomainError("bad ratio range");
    RatioReport out;
    out.target = p.mean();
    out.tolerance = tolerance;
    EventSpec probe = prototype;
    probe.n = n_hi + 1;
    out.family = probe.to_string();

    switch (prototype.functional) {
        case Functional::Height: {
            std::int64_t top = n_hi + 1 + (prototype.width ? *prototype.width : 0);
            HeightLaws hl = height_laws(p, top);
            auto mass = [&](std::int64_t n) {
                double lo = hl.tail[static_cast<std::size_t>(n)];
                if (!prototype.width) return lo;
                return lo - hl.tail[static_cast<std::size_t>(n + *prototype.width)];
            };
            for (std::int64_t n = n_lo; n <= n_hi; n += stride) {
                double below = mass(n);
                if (below <= 0.0) throw ZeroMassEvent("height window at n=" + std::to_string(n));
                out.points.push_back({n, mass(n + 1) / below});
            }
            break;
        }
        case Functional::Card: {
            std::int64_t top = n_hi + 1 + (prototype.width ? *prototype.width : 0);
            PMFVector dw = dwass_pmf(p, 1, top);
            // The size law has total mass one, so unbounded tails are exact
            // complements of the computed head.
            double total = 1.0;
            for (std::int64_t n = n_lo; n <= n_hi; n += stride) {
                double below = window_mass(dw, n, prototype.width, total);
                if (below <= 0.0) throw ZeroMassEvent("size window at n=" + std::to_string(n));
                out.points.push_back({n, window_mass(dw, n + 1, prototype.width, total) / below});
            }
            break;
        }
        case Functional::OutDegreeCount: {
            MarkOffspring mo = mark_offspring(p, prototype.degree_set);
            std::int64_t top = n_hi + 1 + (prototype.width ? *prototype.width : 0);
            PMFVector dw = dwass_pmf(mo.law, 1, top);
            // Mark-count pmf: atom 1-q at zero, q times the image progeny law.
            PMFVector counts;
            counts.offset = 0;
            counts.values.assign(dw.values.size(), 0.0);
            counts.values[0] = 1.0 - mo.q;
            for (std::size_t m = 1; m < dw.values.size(); ++m)
                counts.values[m] = mo.q * dw.values[m];
            double total = 1.0;
            for (std::int64_t n = n_lo; n <= n_hi; n += stride) {
                double below = window_mass(counts, n, prototype.width, total);
                if (below <= 0.0) throw ZeroMassEvent("mark window at n=" + std::to_string(n));
                out.points.push_back(
                    {n, window_mass(counts, n + 1, prototype.width, total) / below});
            }
            break;
        }
        case Functional::GenerationSize:
            throw DomainError("generation-size events do not form a single-index ratio family");
    }
    finalize_ratio(out);
    return out;
}

TVReport tv_at_height_exact(const OffspringDistribution& p, const EventSpec& event,
                            std::int64_t h, std::int64_t card_max, std::uint64_t budget) {
    ConditionedLaw law = conditioned_restriction_law(p, event, h, card_max, budget);
    TVReport out = tv_against_kesten(p, h, law.law, law.deficit);
    out.event = event.to_string();
    out.method = "exact";
    return out;
}

TVReport tv_at_height_mc(const OffspringDistribution& p, const EventSpec& event, std::int64_t h,
                         std::uint64_t replicates, std::uint64_t seed,
                         std::uint64_t max_rejections_per_draw) {
    if (replicates == 0) throw DomainError("need at least one replicate");
    bool point_card = event.functional == Functional::Card && event.width && *event.width == 1;
    std::map<Tree, std::uint64_t> hist;
    if (point_card) {
        std::int64_t n = event.n;
        hist = mc_histogram<Tree>(replicates, seed, [&](SplitMix64& rng) {
            return restrict_tree(sample_progeny_exact(p, n, rng), h).tree();
        });
    } else {
        SamplerBudget budget;
        budget.max_rejections = max_rejections_per_draw;
        auto bound = event.card_bound(p);
        if (bound) budget.max_nodes = static_cast<std::uint64_t>(*bound);
        hist = mc_histogram<Tree>(replicates, seed, [&](SplitMix64& rng) {
            return restrict_tree(sample_conditioned(p, event, rng, budget).tree, h).tree();
        });
    }
    std::map<Tree, double> freq;
    double m = static_cast<double>(replicates);
    for (const auto& [t, c] : hist) freq[t] = static_cast<double>(c) / m;
    TVReport out = tv_against_kesten(p, h, freq, 0.0);
    out.event = event.to_string();
    out.method = "monte_carlo";
    out.samples = replicates;
    out.std_error = 0.5 / std::sqrt(m);
    return out;
}

TVReport kesten_sampler_tv(const OffspringDistribution& p, std::int64_t h,
                           std::uint64_t replicates, std::uint64_t seed) {
    if (replicates == 0) throw DomainError("need at least one replicate");
    auto hist = mc_histogram<Tree>(replicates, seed, [&](SplitMix64& rng) {
        return sample_kesten(p, h, rng).tree().tree();
    });
    std::map<Tree, double> freq;
    double m = static_cast<double>(replicates);
    for (const auto& [t, c] : hist) freq[t] = static_cast<double>(c) / m;
    TVReport out = tv_against_kesten(p, h, freq, 0.0);
    out.event = "spine_sampler";
    out.method = "monte_carlo";
    out.samples = replicates;
    out.std_error = 0.5 / std::sqrt(m);
    return out;
}

TVReport tv_generation_exact_h1(double q, std::int64_t n, std::int64_t alpha) {
    if (n < 1) throw DomainError("generation index must be positive");
    if (alpha < 1) throw DomainError("generation size must be positive");
    OffspringDistribution p = OffspringDistribution::geometric_mixture(q);
    double log_pn = log_geometric_generation_pmf(q, n, alpha);
    if (!std::isfinite(log_pn)) throw ZeroMassEvent("generation size has no mass at alpha");

    // Closed-form law of the previous generation, then k-fold convolutions:
    // P(root degree = k | G_n = alpha) = p(k) conv_k[alpha] / P(G_n = alpha).
    std::size_t width = static_cast<std::size_t>(alpha) + 1;
    std::vector<double> prev(width);
    for (std::size_t j = 0; j < width; ++j)
        prev[j] = geometric_generation_pmf(q, n - 1, static_cast<std::int64_t>(j));

    double pn = std::exp(log_pn);
    TVReport out;
    out.h = 1;
    out.event = "generation_size(gen " + std::to_string(n) + ")=" + std::to_string(alpha);
    out.method = "exact";
    NeumaierSum half_l1, cond_total, kesten_seen;
    std::vector<double> conv = {1.0};  // zero children reach alpha >= 1 never
    for (std::int64_t k = 0; k <= p.max_degree(); ++k) {
        if (k > 0) {
            conv = convolve(conv, prev);
            if (conv.size() > width) conv.resize(width);
        }
        double joint = (static_cast<std::size_t>(alpha) < conv.size())
                           ? p(k) * conv[static_cast<std::size_t>(alpha)]
                           : 0.0;
        double conditioned = joint / pn;
        double kesten = static_cast<double>(k) * p(k) / p.mean();
        half_l1.add(std::fabs(conditioned - kesten));
        cond_total.add(conditioned);
        kesten_seen.add(kesten);
        // Restricted tree at height 1: a root with k leaf children.
        std::vector<std::int64_t> enc(static_cast<std::size_t>(k) + 1, 0);
        enc[0] = k;
        out.top.push_back({Tree::decode(enc), conditioned, kesten});
    }
    out.deficit = std::max(0.0, 1.0 - cond_total.value());
    out.unobserved_kesten = std::max(0.0, 1.0 - kesten_seen.value());
    out.tv = 0.5 * half_l1.value() + 0.5 * out.unobserved_kesten;
    std::stable_sort(out.top.begin(), out.top.end(),
                     [](const TVEntry& a, const TVEntry& b) { return a.conditioned > b.conditioned; });
    if (out.top.size() > 20) out.top.resize(20);
    return out;
}

double condzn_ratio(double q, std::int64_t n, std::int64_t j, std::int64_t alpha) {
    if (j < 1 || j >= n) throw DomainError("need 1 <= j < n");
    return std::exp(log_geometric_generation_pmf(q, n - j, alpha) -
                    log_geometric_generation_pmf(q, n, alpha));
}

std::int64_t shift_constant(const EventSpec& event, const Tree& t, const NodeLabel& x) {
    if (!t.is_leaf(x)) throw NotALeaf("graft point " + x.to_string() + " is not a leaf");
    switch (event.functional) {
        case Functional::Height:
            return static_cast<std::int64_t>(x.generation());
        case Functional::Card:
            return static_cast<std::int64_t>(t.card()) - 1;
        case Functional::OutDegreeCount:
            return t.count_outdegree(event.degree_set) - (event.degree_set.contains(0) ? 1 : 0);
        case Functional::GenerationSize:
            throw DomainError("generation size shifts by a whole law, not a constant");
    }
    throw DomainError("unknown functional");
}

std::int64_t observed_shift_gcd(const OffspringDistribution& p, const EventSpec& event,
                                std::int64_t card_max, std::uint64_t budget) {
    std::int64_t g = 0;
    enumerate_trees(p, card_max, budget, [&](const Tree& t, double) {
        for (const NodeLabel& label : t.labels()) {
            if (!t.is_leaf(label)) continue;
            std::int64_t d = shift_constant(event, t, label);
            if (d > 0) g = std::gcd(g, d);
        }
    });
    return g;
}

TiltCheckReport tilt_invariance_check(const OffspringDistribution& p, const DegreeSet& set,
                                      const std::vector<double>& thetas, std::int64_t n,
                                      std::int64_t card_max, std::uint64_t budget) {
    TiltedFamily family(p, set);
    // Base-law slice, conditioned within the enumeration.
    std::vector<Tree> slice;
    std::vector<double> base_mass;
    double base_total = 0.0;
    enumerate_trees(p, card_max, budget, [&](const Tree& t, double pr) {
        if (t.count_outdegree(set) != n) return;
        slice.push_back(t);
        base_mass.push_back(pr);
        base_total += pr;
    });
    if (slice.empty() || base_total <= 0.0)
        throw ZeroMassEvent("no tree with the requested mark count in the enumeration");

    TiltCheckReport out;
    for (double theta : thetas) {
        OffspringDistribution tilted = family.tilt(theta);
        double tilt_total = 0.0;
        std::vector<double> tilt_mass(slice.size());
        for (std::size_t i = 0; i < slice.size(); ++i) {
            tilt_mass[i] = tree_probability(tilted, slice[i]);
            tilt_total += tilt_mass[i];
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < slice.size(); ++i)
            worst = std::max(worst,
                             std::fabs(tilt_mass[i] / tilt_total - base_mass[i] / base_total));
        out.rows.push_back({theta, worst, slice.size()});
        out.max_discrepancy = std::max(out.max_discrepancy, worst);
    }
    return out;
}

}  // namespace gwt
