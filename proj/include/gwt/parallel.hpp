#pragma once

#include <cstdint>
#include <exception>
#include <map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gwt/compensated.hpp"
#include "gwt/rng.hpp"

namespace gwt {

// Worker count used by the parallel kernels.  Defaults to the
// GWTREE_THREADS environment variable, else the OpenMP default.
int worker_count();
void set_worker_count(int n);

// Discrete convolution (a * b)[j] = sum_i a[i] b[j-i].  Every output entry
// is accumulated in fixed index order with compensated summation, so the
// serial reference and the parallel kernel agree bit for bit.
std::vector<double> convolve_serial(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

namespace detail {

inline double convolve_entry(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t j) {
    std::size_t lo = (j >= b.size()) ? j - b.size() + 1 : 0;
    std::size_t hi = std::min(j, a.size() - 1);
    NeumaierSum s;
    for (std::size_t i = lo; i <= hi; ++i) s.add(a[i] * b[j - i]);
    return s.value();
}

}  // namespace detail

// Monte Carlo histogram: M replicates, replicate i drawn from the substream
// (seed, i).  Counts merge by integer addition, so the result is a pure
// function of (M, seed, draw) independent of scheduling.
template <class Key, class DrawFn>
std::map<Key, std::uint64_t> mc_histogram_serial(std::uint64_t replicates, std::uint64_t seed,
                                                 DrawFn&& draw) {
    std::map<Key, std::uint64_t> out;
    for (std::uint64_t i = 0; i < replicates; ++i) {
        SplitMix64 rng = SplitMix64::substream(seed, i);
        ++out[draw(rng)];
    }
    return out;
}

template <class Key, class DrawFn>
std::map<Key, std::uint64_t> mc_histogram(std::uint64_t replicates, std::uint64_t seed,
                                          DrawFn&& draw) {
#ifndef _OPENMP
    return mc_histogram_serial<Key>(replicates, seed, draw);
#else
    std::map<Key, std::uint64_t> out;
    std::exception_ptr first_error;
    int threads = worker_count();
#pragma omp parallel num_threads(threads)
    {
        std::map<Key, std::uint64_t> local;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(replicates); ++i) {
            try {
                SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(i));
                ++local[draw(rng)];
            } catch (...) {
#pragma omp critical(gwt_mc_err)
                {
                    if (!first_error) first_error = std::current_exception();
                }
            }
        }
#pragma omp critical(gwt_mc_merge)
        {
            for (auto& [key, count] : local) out[key] += count;
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
#endif
}

}  // namespace gwt
