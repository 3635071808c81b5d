#include "gwt/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gwt/compensated.hpp"
#include "gwt/errors.hpp"
#include "gwt/parallel.hpp"

namespace gwt {

namespace {

constexpr double kConvCut = 1e-13;

std::vector<std::int64_t> support_of(const OffspringDistribution& p) {
    std::vector<std::int64_t> supp;
    for (std::int64_t k = 0; k <= p.max_degree(); ++k)
        if (p(k) > 0.0) supp.push_back(k);
    return supp;
}

// Drop upper-tail entries once the cumulative mass reaches 1 - kConvCut.
// Lower entries of later convolutions only depend on lower entries, so the
// cut never perturbs the indices a caller reads.
void cut_upper_tail(std::vector<double>& v) {
    NeumaierSum cum;
    for (std::size_t i = 0; i < v.size(); ++i) {
        cum.add(v[i]);
        if (cum.value() >= 1.0 - kConvCut) {
            v.resize(i + 1);
            return;
        }
    }
}

double log_choose(std::int64_t m, std::int64_t j) {
    return std::lgamma(static_cast<double>(m + 1)) - std::lgamma(static_cast<double>(j + 1)) -
           std::lgamma(static_cast<double>(m - j + 1));
}

}  // namespace

double tree_probability(const OffspringDistribution& p, const Tree& t) {
    double prod = 1.0;
    for (std::int64_t k : t.degrees()) prod *= p(k);
    return prod;
}

double restriction_probability(const OffspringDistribution& p, const Tree& t, std::int64_t h) {
    if (h < 0) throw DomainError("restriction height must be nonnegative");
    if (t.height() > h) throw DomainError("tree is taller than the restriction height");
    std::vector<std::int64_t> depth = t.depths();
    const std::vector<std::int64_t>& deg = t.degrees();
    double prod = 1.0;
    for (std::size_t i = 0; i < deg.size(); ++i)
        if (depth[i] < h) prod *= p(deg[i]);
    return prod;
}

double kesten_restriction_probability(const OffspringDistribution& p, const RestrictedTree& rt) {
    double mu = p.mean();
    if (mu > 1.0 + 1e-9) throw Supercritical("spine tree needs mean offspring <= 1");
    if (mu <= 0.0) throw DomainError("spine tree needs positive mean offspring");
    double z = static_cast<double>(rt.generation_size_at_cap());
    return z * std::pow(mu, -static_cast<double>(rt.cap())) *
           restriction_probability(p, rt.tree(), rt.cap());
}

PMFVector dwass_pmf(const OffspringDistribution& p, std::int64_t k, std::int64_t n_max) {
    if (k < 1) throw DomainError("forest size must be positive");
    if (n_max < 0) throw DomainError("dwass_pmf needs a nonnegative index range");
    PMFVector out;
    out.offset = 0;
    out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    std::vector<double> s = {1.0};  // law of an empty sum
    for (std::int64_t n = 1; n <= n_max; ++n) {
        s = convolve(s, p.probs());
        cut_upper_tail(s);
        std::int64_t j = n - k;
        if (j >= 0 && j < static_cast<std::int64_t>(s.size()))
            out.values[static_cast<std::size_t>(n)] =
                (static_cast<double>(k) / static_cast<double>(n)) * s[static_cast<std::size_t>(j)];
    }
    return out;
}

HeightLaws height_laws(const OffspringDistribution& p, std::int64_t n_max) {
    if (n_max < 0) throw DomainError("height_laws needs a nonnegative range");
    HeightLaws out;
    out.tail.assign(static_cast<std::size_t>(n_max) + 2, 0.0);
    out.pmf.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    double eps = 1.0;  // 1 - phi_n(0)
    out.tail[0] = 1.0;
    for (std::int64_t n = 1; n <= n_max + 1; ++n) {
        // 1 - phi(1 - eps) = sum_{k>=1} p(k) (1 - (1-eps)^k), kept in the
        // small variable so deep subcritical tails never cancel.
        double log_base = std::log1p(-eps);
        NeumaierSum next;
        for (std::int64_t k = 1; k <= p.max_degree(); ++k) {
            double pk = p(k);
            if (pk == 0.0) continue;
            next.add(pk * (-std::expm1(static_cast<double>(k) * log_base)));
        }
        eps = next.value();
        out.tail[static_cast<std::size_t>(n)] = eps;
    }
    for (std::int64_t n = 0; n <= n_max; ++n)
        out.pmf[static_cast<std::size_t>(n)] =
            out.tail[static_cast<std::size_t>(n)] - out.tail[static_cast<std::size_t>(n) + 1];
    return out;
}

double geometric_phi_n(double q, std::int64_t n, double s) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("geometric parameter must lie in (0,1)");
    if (n < 0) throw DomainError("iterate count must be nonnegative");
    if (s < 0.0 || s > 1.0) throw OutsideInterval("generating functions live on [0,1]");
    if (n == 0) return s;
    double a = static_cast<double>(n) * (1.0 - q) / q;
    return (a - (a - 1.0) * s) / ((a + 1.0) - a * s);
}

double log_geometric_generation_pmf(double q, std::int64_t n, std::int64_t k) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("geometric parameter must lie in (0,1)");
    if (n < 0 || k < 0) throw DomainError("generation and size must be nonnegative");
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (n == 0) return k == 1 ? 0.0 : kNegInf;
    double a = static_cast<double>(n) * (1.0 - q) / q;
    if (k == 0) return std::log(a) - std::log1p(a);
    return -2.0 * std::log1p(a) - static_cast<double>(k - 1) * std::log1p(1.0 / a);
}

double geometric_generation_pmf(double q, std::int64_t n, std::int64_t k) {
    return std::exp(log_geometric_generation_pmf(q, n, k));
}

PMFVector generation_size_pmf(const OffspringDistribution& p, std::int64_t n,
                              std::int64_t value_cap) {
    if (n < 0) throw DomainError("generation index must be nonnegative");
    if (value_cap < 1) throw DomainError("generation size cap must be positive");
    double cap = static_cast<double>(value_cap + 1);
    double cost = cap * cap * static_cast<double>(p.max_degree() + 1 + n);
    if (cost > 4e9) throw BudgetExceeded("generation-size recursion is too large at this cap");

    std::size_t width = static_cast<std::size_t>(value_cap) + 1;
    // Convolution powers of p, truncated at the cap.  Entry z is the law of
    // the sum of z offspring counts; low entries are exact because the
    // truncation only removes indices above the cap.
    std::vector<std::vector<double>> power(width);
    power[0] = {1.0};
    for (std::size_t z = 1; z < width; ++z) {
        power[z] = convolve(power[z - 1], p.probs());
        if (power[z].size() > width) power[z].resize(width);
    }

    std::vector<double> g(width, 0.0);
    g[std::min<std::size_t>(1, width - 1)] = 1.0;  // generation 0 is the root
    for (std::int64_t gen = 0; gen < n; ++gen) {
        std::vector<double> next(width, 0.0);
        for (std::size_t j = 0; j < width; ++j) {
            NeumaierSum s;
            for (std::size_t z = 0; z < width; ++z) {
                if (g[z] == 0.0) continue;
                if (j < power[z].size()) s.add(g[z] * power[z][j]);
            }
            next[j] = s.value();
        }
        g.swap(next);
    }
    PMFVector out;
    out.offset = 0;
    out.values = std::move(g);
    return out;
}

void enumerate_trees(const OffspringDistribution& p, std::int64_t card_max, std::uint64_t budget,
                     const std::function<void(const Tree&, double)>& fn) {
    if (card_max < 1) throw DomainError("enumeration needs room for at least the root");
    std::vector<std::int64_t> supp = support_of(p);
    std::vector<std::int64_t> seq;
    std::uint64_t emitted = 0;

    // Depth-first over prefixes, degrees ascending: emission order is
    // lexicographic on encodings.
    auto rec = [&](auto&& self, std::int64_t open, double prob) -> void {
        if (open == 0) {
            if (emitted >= budget) throw BudgetExceeded("tree enumeration budget exhausted");
            ++emitted;
            fn(Tree::decode(seq), prob);
            return;
        }
        for (std::int64_t d : supp) {
            // A completed extension has at least one node per open slot.
            if (static_cast<std::int64_t>(seq.size()) + open + d > card_max) break;
            seq.push_back(d);
            self(self, open - 1 + d, prob * p(d));
            seq.pop_back();
        }
    };
    rec(rec, 1, 1.0);
}

std::vector<EnumeratedTree> enumerate_trees(const OffspringDistribution& p, std::int64_t card_max,
                                            std::uint64_t budget) {
    std::vector<EnumeratedTree> out;
    enumerate_trees(p, card_max, budget,
                    [&](const Tree& t, double pr) { out.push_back({t, pr}); });
    return out;
}

void enumerate_restricted_trees(const OffspringDistribution& p, std::int64_t h,
                                std::uint64_t budget,
                                const std::function<void(const RestrictedTree&, double)>& fn) {
    if (h < 0) throw DomainError("restriction height must be nonnegative");
    std::vector<std::int64_t> supp = support_of(p);
    std::vector<std::int64_t> seq;
    std::vector<std::int64_t> pending;  // depths of nodes awaiting a degree, preorder next on top
    std::uint64_t emitted = 0;

    auto rec = [&](auto&& self, double prob) -> void {
        if (pending.empty()) {
            if (emitted >= budget) throw BudgetExceeded("restricted enumeration budget exhausted");
            ++emitted;
            fn(RestrictedTree(Tree::decode(seq), h), prob);
            return;
        }
        std::int64_t depth = pending.back();
        pending.pop_back();
        if (depth == h) {
            seq.push_back(0);
            self(self, prob);
            seq.pop_back();
        } else {
            for (std::int64_t d : supp) {
                seq.push_back(d);
                for (std::int64_t c = 0; c < d; ++c) pending.push_back(depth + 1);
                self(self, prob * p(d));
                for (std::int64_t c = 0; c < d; ++c) pending.pop_back();
                seq.pop_back();
            }
        }
        pending.push_back(depth);
    };
    pending.push_back(0);
    rec(rec, 1.0);
}

MarkOffspring mark_offspring(const OffspringDistribution& p, const DegreeSet& set,
                             std::int64_t value_cap) {
    if (set.trivially_empty()) throw EmptyMark("mark set has no degrees");
    if (p.mass_of(set) <= 0.0) throw EmptyMark("mark set carries no offspring mass");
    if (value_cap < 1) throw DomainError("mark walk cap must be positive");

    std::size_t vmax = static_cast<std::size_t>(value_cap);
    std::int64_t kmax = p.max_degree();
    // Total-progeny walk absorbed at the first revealed degree in the set.
    // active[v]: mass of unabsorbed states with v pending nodes.
    std::vector<double> active(vmax + 1, 0.0);
    std::vector<double> success(vmax + static_cast<std::size_t>(kmax) + 1, 0.0);
    double fail_mass = 0.0;
    double lost = 0.0;
    active[1] = 1.0;
    double active_total = 1.0;
    const std::uint64_t step_cap = 1 << 14;
    for (std::uint64_t step = 0; step < step_cap && active_total > 1e-19; ++step) {
        std::vector<double> next(vmax + 1, 0.0);
        for (std::size_t v = 1; v <= vmax; ++v) {
            double av = active[v];
            if (av == 0.0) continue;
            for (std::int64_t k = 0; k <= kmax; ++k) {
                double m = av * p(k);
                if (m == 0.0) continue;
                if (set.contains(k)) {
                    success[v - 1 + static_cast<std::size_t>(k)] += m;
                } else {
                    std::int64_t v2 = static_cast<std::int64_t>(v) - 1 + k;
                    if (v2 == 0)
                        fail_mass += m;
                    else if (v2 > static_cast<std::int64_t>(vmax))
                        lost += m;
                    else
                        next[static_cast<std::size_t>(v2)] += m;
                }
            }
        }
        active.swap(next);
        NeumaierSum tot;
        for (double a : active) tot.add(a);
        active_total = tot.value();
    }
    lost += active_total;

    NeumaierSum succ_sum;
    for (double s : success) succ_sum.add(s);
    double total_success = succ_sum.value();
    if (total_success <= 0.0) throw EmptyMark("mark walk never absorbs on the set");
    double q = set.contains(0) ? 1.0 : total_success;

    while (success.size() > 1 && success.back() == 0.0) success.pop_back();
    PMFVector xtilde;
    xtilde.offset = 0;
    xtilde.values = success;
    for (double& s : xtilde.values) s /= total_success;

    std::vector<double> law;
    if (q >= 1.0) {
        law = xtilde.values;
    } else {
        // Binomial thinning: each pending subtree carries a mark with
        // probability q independently.
        double lq = std::log(q);
        double l1q = std::log1p(-q);
        law.assign(xtilde.values.size(), 0.0);
        for (std::size_t j = 0; j < law.size(); ++j) {
            NeumaierSum s;
            for (std::size_t m = j; m < xtilde.values.size(); ++m) {
                double xm = xtilde.values[m];
                if (xm == 0.0) continue;
                double lb = log_choose(static_cast<std::int64_t>(m), static_cast<std::int64_t>(j)) +
                            static_cast<double>(j) * lq + static_cast<double>(m - j) * l1q;
                s.add(xm * std::exp(lb));
            }
            law[j] = s.value();
        }
    }
    NeumaierSum law_sum;
    for (double x : law) law_sum.add(x);
    for (double& x : law) x /= law_sum.value();
    return MarkOffspring{OffspringDistribution::from_pmf(law), std::move(xtilde), q, lost};
}

namespace {

// P(count of marked nodes = m) for m in [0, m_max].
std::vector<double> mark_count_pmf(const OffspringDistribution& p, const DegreeSet& set,
                                   std::int64_t m_max) {
    std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
    if (p.mass_of(set) <= 0.0) {
        out[0] = 1.0;
        return out;
    }
    MarkOffspring mo = mark_offspring(p, set);
    out[0] = 1.0 - mo.q;
    if (m_max >= 1) {
        PMFVector dw = dwass_pmf(mo.law, 1, m_max);
        for (std::int64_t m = 1; m <= m_max; ++m)
            out[static_cast<std::size_t>(m)] = mo.q * dw.at(m);
    }
    return out;
}

}  // namespace

double event_probability(const OffspringDistribution& p, const EventSpec& event) {
    std::int64_t lo = std::max<std::int64_t>(event.n, 0);
    switch (event.functional) {
        case Functional::Card: {
            if (event.width) {
                std::int64_t hi = event.n + *event.width - 1;
                if (hi < 1) return 0.0;
                PMFVector dw = dwass_pmf(p, 1, hi);
                NeumaierSum s;
                for (std::int64_t m = std::max<std::int64_t>(lo, 1); m <= hi; ++m) s.add(dw.at(m));
                return s.value();
            }
            // Unbounded windows count survival mass as well.
            if (lo <= 1) return 1.0;
            PMFVector dw = dwass_pmf(p, 1, lo - 1);
            NeumaierSum below;
            for (std::int64_t m = 1; m < lo; ++m) below.add(dw.at(m));
            return 1.0 - below.value();
        }
        case Functional::Height: {
            if (event.n < 0 && !event.width) return 1.0;
            std::int64_t top = event.width ? event.n + *event.width : lo;
            HeightLaws hl = height_laws(p, std::max<std::int64_t>(top, 0));
            double tail_lo = lo < static_cast<std::int64_t>(hl.tail.size())
                                 ? hl.tail[static_cast<std::size_t>(lo)]
                                 : 0.0;
            if (!event.width) return tail_lo;
            std::int64_t hi = event.n + *event.width;
            if (hi <= 0) return 0.0;
            double tail_hi = hi < static_cast<std::int64_t>(hl.tail.size())
                                 ? hl.tail[static_cast<std::size_t>(hi)]
                                 : 0.0;
            return tail_lo - tail_hi;
        }
        case Functional::OutDegreeCount: {
            if (event.width) {
                std::int64_t hi = event.n + *event.width - 1;
                if (hi < 0) return 0.0;
                std::vector<double> pmf = mark_count_pmf(p, event.degree_set, hi);
                NeumaierSum s;
                for (std::int64_t m = lo; m <= hi; ++m) s.add(pmf[static_cast<std::size_t>(m)]);
                return s.value();
            }
            if (lo == 0) return 1.0;
            std::vector<double> pmf = mark_count_pmf(p, event.degree_set, lo - 1);
            NeumaierSum below;
            for (std::int64_t m = 0; m < lo; ++m) below.add(pmf[static_cast<std::size_t>(m)]);
            return 1.0 - below.value();
        }
        case Functional::GenerationSize: {
            std::int64_t hi = event.width ? event.n + *event.width - 1
                                          : std::max<std::int64_t>(lo - 1, 0);
            std::int64_t cap = std::max<std::int64_t>(512, hi + 64);
            PMFVector g = generation_size_pmf(p, event.generation, cap);
            if (event.width) {
                NeumaierSum s;
                for (std::int64_t m = lo; m <= hi; ++m) s.add(g.at(m));
                return s.value();
            }
            NeumaierSum below;
            for (std::int64_t m = 0; m < lo; ++m) below.add(g.at(m));
            return 1.0 - below.value();
        }
    }
    throw DomainError("unknown functional");
}

ConditionedLaw conditioned_restriction_law(const OffspringDistribution& p, EventSpec event,
                                           std::int64_t h, std::int64_t card_max,
                                           std::uint64_t budget, double refuse_tol) {
    ConditionedLaw out;
    out.h = h;
    out.snapped_from = event.snap_to_lattice(p);
    out.event_mass = event_probability(p, event);
    if (!(out.event_mass > 0.0)) throw ZeroMassEvent("event " + event.to_string() + " has mass 0");

    NeumaierSum captured;
    enumerate_trees(p, card_max, budget, [&](const Tree& t, double pr) {
        if (!event.matches(t)) return;
        out.law[restrict_tree(t, h).tree()] += pr;
        captured.add(pr);
    });
    double missing = out.event_mass - captured.value();
    out.deficit = std::max(0.0, missing) / out.event_mass;
    if (out.deficit > refuse_tol) {
        std::ostringstream os;
        os << "event " << event.to_string() << " keeps " << out.deficit
           << " of its mass outside the enumeration (card_max " << card_max << ")";
        throw TruncationRefused(os.str());
    }
    for (auto& [key, mass] : out.law) mass /= out.event_mass;
    return out;
}

}  // namespace gwt
