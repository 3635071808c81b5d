#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gwt {

// Neumaier compensated accumulator.  Summation order is part of the contract:
// callers that need bit-identical results across thread counts must feed
// values in a fixed order.
class NeumaierSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(const std::vector<double>& xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace gwt
