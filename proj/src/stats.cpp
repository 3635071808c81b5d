#include "gwt/stats.hpp"

#include <cmath>
#include <limits>

#include "gwt/errors.hpp"

namespace gwt {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a,x), valid for x > a+1.
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("incomplete gamma needs a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("incomplete gamma needs a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_p_value(double statistic, std::int64_t dof) {
    if (dof < 1) throw DomainError("chi-square needs at least one degree of freedom");
    if (statistic < 0.0) throw DomainError("chi-square statistic must be nonnegative");
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

ChiSquare chi_square_gof(const std::vector<std::uint64_t>& counts,
                         const std::vector<double>& probs) {
    if (counts.size() != probs.size() || counts.empty())
        throw DomainError("counts and cell probabilities must align");
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw DomainError("chi-square needs observations");
    ChiSquare out;
    std::int64_t cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double expected = probs[i] * static_cast<double>(total);
        if (expected <= 0.0) {
            if (counts[i] > 0) throw DomainError("observed mass in a zero-probability cell");
            continue;
        }
        double diff = static_cast<double>(counts[i]) - expected;
        out.statistic += diff * diff / expected;
        ++cells;
    }
    if (cells < 2) throw DomainError("chi-square needs at least two live cells");
    out.dof = cells - 1;
    out.p_value = chi_square_p_value(out.statistic, out.dof);
    return out;
}

}  // namespace gwt
