#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace gwt {

// Regularized incomplete gamma functions, series expansion below a+1 and
// continued fraction above; relative accuracy ~1e-12 over the range used.
double gamma_p(double a, double x);  // P(a,x), lower
double gamma_q(double a, double x);  // Q(a,x) = 1 - P(a,x)

// Upper tail of the chi-square law with dof degrees of freedom.
double chi_square_p_value(double statistic, std::int64_t dof);

// Goodness-of-fit of observed counts against cell probabilities; cells with
// zero expected mass must carry zero counts (DomainError otherwise).
struct ChiSquare {
    double statistic = 0.0;
    std::int64_t dof = 0;
    double p_value = 1.0;
};
ChiSquare chi_square_gof(const std::vector<std::uint64_t>& counts,
                         const std::vector<double>& probs);

}  // namespace gwt
