#pragma once

#include <cstdint>

namespace gwt {

// splitmix64: counter-based generator.  The state is a counter advanced by a
// fixed odd increment and every output is a bijective finalizer of the state,
// so a stream is a pure function of (seed, draw index).  Substreams derived
// from (seed, stream id) let Monte Carlo replicates consume independent
// streams regardless of which thread executes them.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
        return SplitMix64(mix(seed + kGamma * (mix(stream) | 1ULL)));
    }

    std::uint64_t next() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on {1,...,n}; n >= 1.
    std::uint64_t next_index(std::uint64_t n) {
        std::uint64_t i = 1 + static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
        return i > n ? n : i;
    }

    bool next_bernoulli(double prob) { return next_double() < prob; }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace gwt
