// Timing harness for the two parallel kernels against their serial
// references.  Results must agree bit for bit; the table reports wall time
// and speedup per thread count.  Single-core machines will show speedups
// near or below one, which is expected.
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gwt/offspring.hpp"
#include "gwt/parallel.hpp"
#include "gwt/rng.hpp"
#include "gwt/samplers.hpp"
#include "gwt/tree.hpp"

using namespace gwt;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> dense_pmf(std::size_t n) {
    // Geometric-flavoured mass vector; only the shape matters for timing.
    std::vector<double> v(n);
    double total = 0.0;
    SplitMix64 rng(7);
    for (auto& x : v) total += (x = 0.5 + rng.next_double());
    for (auto& x : v) x /= total;
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t conv_size = 4096;
    std::uint64_t replicates = 400000;
    if (argc > 1) conv_size = static_cast<std::size_t>(std::strtoull(argv[1], nullptr, 10));
    if (argc > 2) replicates = std::strtoull(argv[2], nullptr, 10);

    auto p = OffspringDistribution::geometric_mixture(0.5);
    SamplerBudget clip;
    clip.max_nodes = 1 << 14;
    auto draw = [&](SplitMix64& rng) -> std::int64_t {
        // Size of one spine draw at height 3: tree-shaped work per replicate.
        try {
            return static_cast<std::int64_t>(sample_kesten(p, 3, rng, clip).tree().tree().card());
        } catch (const BudgetExceeded&) {
            return -1;
        }
    };

    auto a = dense_pmf(conv_size);
    auto b = dense_pmf(conv_size);

    std::printf("kernel            threads      wall      speedup   identical\n");

    auto t0 = std::chrono::steady_clock::now();
    auto conv_ref = convolve_serial(a, b);
    double conv_base = seconds_since(t0);
    std::printf("convolve %-8zu  serial   %8.3f s      1.00\n", conv_size, conv_base);

    t0 = std::chrono::steady_clock::now();
    auto hist_ref = mc_histogram_serial<std::int64_t>(replicates, 20240901, draw);
    double hist_base = seconds_since(t0);
    std::printf("histogram %-7" PRIu64 "  serial   %8.3f s      1.00\n", replicates, hist_base);

    for (int threads : {1, 2, 4, 8}) {
        set_worker_count(threads);

        t0 = std::chrono::steady_clock::now();
        auto conv_par = convolve(a, b);
        double conv_t = seconds_since(t0);
        std::printf("convolve %-8zu  %4d     %8.3f s    %6.2f      %s\n", conv_size, threads,
                    conv_t, conv_base / conv_t, conv_par == conv_ref ? "yes" : "NO");

        t0 = std::chrono::steady_clock::now();
        auto hist_par = mc_histogram<std::int64_t>(replicates, 20240901, draw);
        double hist_t = seconds_since(t0);
        std::printf("histogram %-7" PRIu64 "  %4d     %8.3f s    %6.2f      %s\n", replicates,
                    threads, hist_t, hist_base / hist_t, hist_par == hist_ref ? "yes" : "NO");

        if (conv_par != conv_ref || hist_par != hist_ref) return 1;
    }
    return 0;
}
