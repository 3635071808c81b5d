#include "gwt/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gwt/compensated.hpp"

namespace gwt {

namespace {

std::string pmf_spec_json(const std::vector<double>& probs) {
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t k = 0; k < probs.size(); ++k)
        if (probs[k] > 0.0) values[std::to_string(k)] = probs[k];
    nlohmann::json j{{"kind", "pmf"}, {"values", values}};
    return j.dump();
}

}  // namespace

OffspringDistribution::OffspringDistribution(std::vector<double> probs, bool truncated,
                                             double truncated_mass, std::string spec_json)
    : probs_(std::move(probs)),
      truncated_(truncated),
      truncated_mass_(truncated_mass),
      spec_json_(std::move(spec_json)) {
    if (probs_.empty()) throw DomainError("empty probability vector");
    for (double p : probs_)
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be >= 0");
    double total = compensated_total(probs_);
    if (std::fabs(total - 1.0) > kMassTolerance + truncated_mass_)
        throw DomainError("probabilities sum to " + std::to_string(total) + ", not 1");
    // Renormalize exactly once; afterwards the vector is treated as exact.
    for (double& p : probs_) p /= total;
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();

    NeumaierSum mean;
    for (std::size_t k = 0; k < probs_.size(); ++k)
        mean.add(static_cast<double>(k) * probs_[k]);
    mean_ = mean.value();
    span_ = 0;
    for (std::size_t k = 1; k < probs_.size(); ++k)
        if (probs_[k] > 0.0) span_ = std::gcd(span_, static_cast<std::int64_t>(k));
    cum_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        acc += probs_[k];
        cum_[k] = acc;
    }
    cum_.back() = 1.0;
}

OffspringDistribution OffspringDistribution::from_pmf(std::vector<double> probs) {
    std::string spec = pmf_spec_json(probs);
    return OffspringDistribution(std::move(probs), false, 0.0, std::move(spec));
}

OffspringDistribution OffspringDistribution::geometric_mixture(double q, double tail_cut) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("geometric_mixture needs q in (0,1)");
    if (!(tail_cut > 0.0 && tail_cut < 1.0)) throw DomainError("bad tail cut");
    // Tail beyond K is q (1-q)^K; find the smallest K with tail <= cut.
    std::vector<double> probs{1.0 - q};
    double term = q * q;  // p(1)
    double tail = q;      // mass of {1,2,...}
    while (tail > tail_cut) {
        probs.push_back(term);
        tail -= term;
        term *= (1.0 - q);
    }
    nlohmann::json j{{"kind", "geometric_mixture"}, {"q", q}, {"tail_cut", tail_cut}};
    return OffspringDistribution(std::move(probs), true, tail, j.dump());
}

OffspringDistribution OffspringDistribution::poisson(double lambda, double tail_cut) {
    if (!(lambda > 0.0)) throw DomainError("poisson needs lambda > 0");
    if (!(tail_cut > 0.0 && tail_cut < 1.0)) throw DomainError("bad tail cut");
    std::vector<double> probs;
    double term = std::exp(-lambda);
    double tail = 1.0;
    std::size_t k = 0;
    while (tail > tail_cut) {
        probs.push_back(term);
        tail -= term;
        ++k;
        term *= lambda / static_cast<double>(k);
    }
    nlohmann::json j{{"kind", "poisson"}, {"lambda", lambda}, {"tail_cut", tail_cut}};
    return OffspringDistribution(std::move(probs), true, std::max(tail, 0.0), j.dump());
}

OffspringDistribution OffspringDistribution::power_law(double p0, double exponent,
                                                       double tail_cut) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("power_law needs p0 in (0,1)");
    if (!(exponent > 2.0)) throw DomainError("power_law needs exponent > 2 for a finite mean");
    if (!(tail_cut > 0.0 && tail_cut < 1.0)) throw DomainError("bad tail cut");
    // Grow the support until the integral bound on the remaining zeta tail
    // drops below the cut, relative to the mass kept so far.
    NeumaierSum z;
    std::vector<double> weights;
    double k = 1.0;
    for (;;) {
        weights.push_back(std::pow(k, -exponent));
        z.add(weights.back());
        double tail_bound = std::pow(k, 1.0 - exponent) / (exponent - 1.0);
        if (tail_bound <= tail_cut * z.value()) break;
        k += 1.0;
        if (weights.size() > 100000000) throw BudgetExceeded("power_law support too large");
    }
    std::vector<double> probs{p0};
    for (double w : weights) probs.push_back((1.0 - p0) * w / z.value());
    nlohmann::json j{{"kind", "power_law"},
                     {"p0", p0},
                     {"exponent", exponent},
                     {"tail_cut", tail_cut}};
    double lost = (1.0 - p0) * tail_cut;
    return OffspringDistribution(std::move(probs), true, lost, j.dump());
}

OffspringDistribution OffspringDistribution::from_json_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad distribution JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("distribution spec needs a \"kind\" field");
    std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "pmf") {
            if (!j.contains("values") || !j["values"].is_object())
                throw ConfigError("pmf spec needs a \"values\" object");
            std::vector<double> probs;
            for (auto& [key, value] : j["values"].items()) {
                std::size_t pos = 0;
                long long k = std::stoll(key, &pos);
                if (pos != key.size() || k < 0) throw ConfigError("bad pmf key: " + key);
                if (probs.size() <= static_cast<std::size_t>(k))
                    probs.resize(static_cast<std::size_t>(k) + 1, 0.0);
                probs[static_cast<std::size_t>(k)] = value.get<double>();
            }
            return from_pmf(std::move(probs));
        }
        if (kind == "geometric_mixture") {
            double q = j.at("q").get<double>();
            double cut = j.value("tail_cut", kDefaultTailCut);
            return geometric_mixture(q, cut);
        }
        if (kind == "poisson") {
            double lambda = j.at("lambda").get<double>();
            double cut = j.value("tail_cut", kDefaultTailCut);
            return poisson(lambda, cut);
        }
        if (kind == "power_law") {
            double p0 = j.at("p0").get<double>();
            double exponent = j.at("exponent").get<double>();
            double cut = j.value("tail_cut", 1e-9);
            return power_law(p0, exponent, cut);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad distribution JSON: ") + e.what());
    }
    throw ConfigError("unknown distribution kind: " + kind);
}

double OffspringDistribution::mass_of(const DegreeSet& set) const {
    NeumaierSum s;
    for (std::size_t k = 0; k < probs_.size(); ++k)
        if (set.contains(static_cast<std::int64_t>(k))) s.add(probs_[k]);
    return s.value();
}

bool OffspringDistribution::basic_conditions() const {
    return probs_[0] > 0.0 && probs_[0] + (*this)(1) < 1.0;
}

double OffspringDistribution::gf(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("gf argument outside [0,1]");
    // Horner, highest degree first.
    double acc = 0.0;
    for (std::size_t k = probs_.size(); k-- > 0;) acc = acc * s + probs_[k];
    return acc;
}

double OffspringDistribution::gf_derivative(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("gf argument outside [0,1]");
    double acc = 0.0;
    for (std::size_t k = probs_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * probs_[k];
    return acc;
}

double OffspringDistribution::gf_iterate(std::int64_t n, double s) const {
    if (n < 0) throw DomainError("iteration count must be >= 0");
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("gf argument outside [0,1]");
    double x = s;
    // The clamp only absorbs ulp-level round-up of intermediate values; the
    // input itself was validated above.
    for (std::int64_t i = 0; i < n; ++i) x = gf(std::min(x, 1.0));
    return x;
}

OffspringDistribution OffspringDistribution::size_biased() const {
    if (!(mean_ > 0.0)) throw DomainError("size-biased law needs mean > 0");
    std::vector<double> probs(probs_.size(), 0.0);
    for (std::size_t k = 1; k < probs_.size(); ++k)
        probs[k] = static_cast<double>(k) * probs_[k] / mean_;
    std::string spec = pmf_spec_json(probs);
    // Inherit the truncation marker: a cut tail stays cut after biasing.
    return OffspringDistribution(std::move(probs), truncated_,
                                 truncated_mass_ * static_cast<double>(probs_.size()), spec);
}

std::int64_t OffspringDistribution::sample(SplitMix64& rng) const {
    double u = rng.next_double();
    // cum_ is short (tail-cut support); linear scan keeps draws branch-simple.
    for (std::size_t k = 0; k < cum_.size(); ++k)
        if (u < cum_[k]) return static_cast<std::int64_t>(k);
    return max_degree();
}

TiltedFamily::TiltedFamily(OffspringDistribution base, DegreeSet set)
    : base_(std::move(base)), set_(std::move(set)) {
    if (set_.trivially_empty()) throw EmptySet("tilted family needs a nonempty degree set");
    if (!(base_.mass_of(set_) > 0.0))
        throw DomainError("degree set carries no base mass; conditioning is degenerate");
}

double TiltedFamily::normalizer(double theta) const {
    if (!(theta > 0.0)) throw OutsideInterval("tilt parameter must be > 0");
    NeumaierSum in_set, off_set;
    double pow_theta = 1.0;  // theta^k
    for (std::int64_t k = 0; k <= base_.max_degree(); ++k) {
        double p = base_(k);
        if (set_.contains(k))
            in_set.add(pow_theta * p);
        else
            off_set.add((k == 0 ? 1.0 / theta : pow_theta / theta) * p);
        pow_theta *= theta;
    }
    return (1.0 - off_set.value()) / in_set.value();
}

OffspringDistribution TiltedFamily::tilt(double theta) const {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw OutsideInterval("tilt parameter must be finite and > 0");
    std::int64_t kmax = base_.max_degree();
    // A truncated base stands for an infinite-support family: refuse a theta
    // whose tilted tail terms are still growing at the cut, since the true
    // series diverges there.
    if (base_.tail_truncated() && kmax >= 8) {
        double t_prev = base_(kmax - 4) * std::pow(theta, static_cast<double>(kmax - 4));
        double t_last = base_(kmax) * std::pow(theta, static_cast<double>(kmax));
        if (t_last > 1e-16 && t_last >= t_prev)
            throw SeriesDivergence("tilted tail not decreasing at the truncation cut");
    }
    double c = normalizer(theta);
    if (!std::isfinite(c) || c < 0.0)
        throw OutsideInterval("negative normalizer: theta outside the validity interval");
    std::vector<double> probs(static_cast<std::size_t>(kmax) + 1, 0.0);
    double pow_theta = 1.0;
    for (std::int64_t k = 0; k <= kmax; ++k) {
        double p = base_(k);
        double mass = set_.contains(k) ? c * pow_theta * p : pow_theta / theta * p;
        if (mass < 0.0 || !std::isfinite(mass))
            throw OutsideInterval("negative tilted mass: theta outside the validity interval");
        probs[static_cast<std::size_t>(k)] = mass;
        pow_theta *= theta;
    }
    std::string spec = pmf_spec_json(probs);
    return OffspringDistribution(std::move(probs), base_.tail_truncated(), 0.0, std::move(spec));
}

bool TiltedFamily::valid_at(double theta) const {
    try {
        tilt(theta);
        return true;
    } catch (const OutsideInterval&) {
        return false;
    } catch (const SeriesDivergence&) {
        return false;
    }
}

TiltInterval TiltedFamily::interval() const {
    if (!valid_at(1.0)) throw DomainError("tilted family invalid at theta = 1");
    const double kProbeTol = 1e-12;
    TiltInterval out;
    // Upper end: double until invalid (cap keeps divergent families finite).
    double lo = 1.0, hi = 1.0;
    bool found_invalid = false;
    for (double probe = 2.0; probe <= 1e9; probe *= 2.0) {
        if (valid_at(probe)) {
            lo = probe;
        } else {
            hi = probe;
            found_invalid = true;
            break;
        }
    }
    if (!found_invalid) {
        out.hi = lo;  // effectively unbounded above the probe cap
        out.hi_open = false;
    } else {
        while (hi - lo > kProbeTol * std::max(1.0, lo)) {
            double mid = 0.5 * (lo + hi);
            (valid_at(mid) ? lo : hi) = mid;
        }
        out.hi = lo;
        out.hi_open = !valid_at(hi);
    }
    // Lower end: halve toward zero.
    double lo2 = 0.0, hi2 = 1.0;
    bool found_invalid_low = false;
    for (double probe = 0.5; probe >= 1e-12; probe *= 0.5) {
        if (valid_at(probe)) {
            hi2 = probe;
        } else {
            lo2 = probe;
            found_invalid_low = true;
            break;
        }
    }
    if (!found_invalid_low) {
        out.lo = 0.0;
        out.lo_open = true;
    } else {
        while (hi2 - lo2 > kProbeTol * std::max(1.0, hi2)) {
            double mid = 0.5 * (lo2 + hi2);
            (valid_at(mid) ? hi2 : lo2) = mid;
        }
        out.lo = hi2;
        out.lo_open = !valid_at(lo2);
    }
    return out;
}

std::optional<double> TiltedFamily::critical_theta(double tol) const {
    TiltInterval iv = interval();
    auto mean_at = [this](double theta) { return tilt(theta).mean(); };
    double f1 = mean_at(1.0) - 1.0;
    if (std::fabs(f1) <= tol) return 1.0;
    // March away from 1 toward the side that can raise (or lower) the mean.
    // Mean monotonicity is only guaranteed for A = naturals, so probe a grid
    // on both sides and bisect the first bracket found.
    auto bisect = [&](double a, double b, double fa) -> std::optional<double> {
        for (int iter = 0; iter < 400; ++iter) {
            double mid = 0.5 * (a + b);
            double fm = mean_at(mid) - 1.0;
            if (std::fabs(fm) <= tol && (b - a) <= 1e-13 * std::max(1.0, mid)) return mid;
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        double mid = 0.5 * (a + b);
        return (std::fabs(mean_at(mid) - 1.0) <= tol) ? std::optional<double>(mid) : std::nullopt;
    };
    const int kGrid = 64;
    // Grid from 1 to each endpoint (endpoints nudged inward).
    for (int side = 0; side < 2; ++side) {
        double end = (side == 0) ? iv.hi : iv.lo;
        if (side == 0 && !(end > 1.0)) continue;
        if (side == 1 && !(end < 1.0)) continue;
        double inset = (side == 0 ? end - 1e-9 * std::max(1.0, end) : end + 1e-9);
        if (!valid_at(inset)) inset = 0.5 * (1.0 + end);
        double prev = 1.0, fprev = f1;
        for (int g = 1; g <= kGrid; ++g) {
            double theta = 1.0 + (inset - 1.0) * static_cast<double>(g) / kGrid;
            if (!valid_at(theta)) break;
            double f = mean_at(theta) - 1.0;
            if (std::fabs(f) <= tol) return theta;
            if ((f < 0.0) != (fprev < 0.0)) return bisect(prev, theta, fprev);
            prev = theta;
            fprev = f;
        }
    }
    return std::nullopt;  // no critical member: family not generic for this set
}

}  // namespace gwt
