#include "gwt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gwt {

namespace {
int g_workers = 0;  // 0: not set yet
}

int worker_count() {
    if (g_workers > 0) return g_workers;
    if (const char* env = std::getenv("GWTREE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) {
            g_workers = n;
            return g_workers;
        }
    }
#ifdef _OPENMP
    g_workers = omp_get_max_threads();
#else
    g_workers = 1;
#endif
    return g_workers;
}

void set_worker_count(int n) {
    if (n > 0) g_workers = n;
}

std::vector<double> convolve_serial(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = detail::convolve_entry(a, b, j);
    return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
#ifdef _OPENMP
    int threads = worker_count();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(out.size()); ++j)
        out[static_cast<std::size_t>(j)] =
            detail::convolve_entry(a, b, static_cast<std::size_t>(j));
#else
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = detail::convolve_entry(a, b, j);
#endif
    return out;
}

}  // namespace gwt
