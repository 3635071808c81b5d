#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwt/errors.hpp"
#include "gwt/rng.hpp"
#include "gwt/tree.hpp"

namespace gwt {

// Offspring law on {0,1,...,K} stored densely.  Families with infinite
// support are truncated at cumulative mass 1 - tail_cut and renormalized
// exactly once at construction; total-mass defects beyond 1e-12 before that
// renormalization are rejected.
class OffspringDistribution {
  public:
    static constexpr double kMassTolerance = 1e-12;
    static constexpr double kDefaultTailCut = 1e-14;

    // Raw probabilities p(0..K); rejects negative entries and total mass
    // off by more than kMassTolerance.
    static OffspringDistribution from_pmf(std::vector<double> probs);
    // p(0) = 1-q, p(k) = q^2 (1-q)^{k-1}: critical for every q in (0,1).
    static OffspringDistribution geometric_mixture(double q, double tail_cut = kDefaultTailCut);
    static OffspringDistribution poisson(double lambda, double tail_cut = kDefaultTailCut);
    // p(0) = p0, p(k) proportional to k^-exponent: radius of convergence 1,
    // the stand-in for laws whose tilted family has no critical member.
    // Heavy tail, so the default cut is coarser than elsewhere.
    static OffspringDistribution power_law(double p0, double exponent, double tail_cut = 1e-9);
    // Parses {"kind":"pmf",...} | {"kind":"geometric_mixture",...} | {"kind":"poisson",...}
    // | {"kind":"power_law",...}.
    static OffspringDistribution from_json_spec(const std::string& json_text);

    double operator()(std::int64_t k) const {
        return (k >= 0 && k < static_cast<std::int64_t>(probs_.size()))
                   ? probs_[static_cast<std::size_t>(k)]
                   : 0.0;
    }
    const std::vector<double>& probs() const { return probs_; }
    std::int64_t max_degree() const { return static_cast<std::int64_t>(probs_.size()) - 1; }
    // True when an infinite-support family was cut; the removed mass.
    bool tail_truncated() const { return truncated_; }
    double truncated_mass() const { return truncated_mass_; }

    double mean() const { return mean_; }
    // gcd of the positive support; 0 if the law is concentrated at 0.
    std::int64_t span() const { return span_; }
    double mass_of(const DegreeSet& set) const;
    // p(0) > 0, p(0)+p(1) < 1 (finite mean holds by construction).
    bool basic_conditions() const;

    // Generating function sum_k p(k) s^k on [0,1]; DomainError outside.
    double gf(double s) const;
    double gf_derivative(double s) const;
    // n-fold iterate applied to s; n = 0 returns s.
    double gf_iterate(std::int64_t n, double s) const;

    // Size-biased law k p(k)/mean; DomainError when mean is 0.
    OffspringDistribution size_biased() const;

    std::int64_t sample(SplitMix64& rng) const;

    std::string to_json_spec() const { return spec_json_; }

  private:
    friend class TiltedFamily;
    OffspringDistribution(std::vector<double> probs, bool truncated, double truncated_mass,
                          std::string spec_json);
    std::vector<double> probs_;
    std::vector<double> cum_;
    double mean_ = 0.0;
    std::int64_t span_ = 0;
    bool truncated_ = false;
    double truncated_mass_ = 0.0;
    std::string spec_json_;
};

// Validity interval of the tilted family, found numerically.  lo/hi are the
// probed endpoints (the interval is open where marked).
struct TiltInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = true;
    bool hi_open = true;
};

// One-parameter exponential family attached to a base law p and a degree set
// A: members keep the conditional law given the number of A-degree nodes.
//   p_theta(k) = c_A(theta) theta^k p(k)        for k in A
//   p_theta(k) = theta^{k-1} p(k)               for k not in A
//   c_A(theta) = (1 - sum_{k not in A} theta^{k-1} p(k)) / sum_{k in A} theta^k p(k)
class TiltedFamily {
  public:
    TiltedFamily(OffspringDistribution base, DegreeSet set);

    const OffspringDistribution& base() const { return base_; }
    const DegreeSet& degree_set() const { return set_; }

    // Member law at theta; OutsideInterval when some mass would be negative,
    // SeriesDivergence when the tilted tail is still growing at the cut of a
    // truncated base.
    OffspringDistribution tilt(double theta) const;
    double normalizer(double theta) const;  // c_A(theta)

    // Numerical bounds of the validity interval around theta = 1.
    TiltInterval interval() const;

    // Smallest-bracket solution of mean(tilt(theta)) = 1 searched outward
    // from theta = 1; nullopt when no member of the family is critical
    // (the family is not generic for this A).
    std::optional<double> critical_theta(double tol = 1e-10) const;

  private:
    bool valid_at(double theta) const;
    OffspringDistribution base_;
    DegreeSet set_;
};

}  // namespace gwt
