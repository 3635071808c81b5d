#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gwt {

// Probability mass on a contiguous integer range [offset, offset + size).
// deficit() reports the mass lost to truncation; exact laws carry ~0.
struct PMFVector {
    std::int64_t offset = 0;
    std::vector<double> values;

    double at(std::int64_t index) const {
        std::int64_t i = index - offset;
        if (i < 0 || i >= static_cast<std::int64_t>(values.size())) return 0.0;
        return values[static_cast<std::size_t>(i)];
    }
    double total_mass() const;
    double deficit() const { return 1.0 - total_mass(); }

    // "index,probability" rows; meta lines start with '#'.
    std::string to_csv() const;
    std::string to_json() const;
};

}  // namespace gwt
