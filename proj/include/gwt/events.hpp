#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gwt/offspring.hpp"
#include "gwt/tree.hpp"

namespace gwt {

enum class Functional {
    Height,
    Card,
    OutDegreeCount,   // number of nodes with out-degree in a set
    GenerationSize,   // size of one fixed generation
};

std::string functional_name(Functional f);

// Conditioning event.  For Height/Card/OutDegreeCount the event is
// {functional in [n, n+width)} with width possibly infinite; for
// GenerationSize it is {generation g has exactly n nodes}.
struct EventSpec {
    Functional functional = Functional::Card;
    std::int64_t n = 1;
    std::optional<std::int64_t> width = 1;  // nullopt: infinite window
    DegreeSet degree_set = DegreeSet::of({0});  // OutDegreeCount only
    std::int64_t generation = 0;                // GenerationSize only

    static EventSpec height_at_least(std::int64_t n);
    static EventSpec height_exactly(std::int64_t n);
    static EventSpec card_exactly(std::int64_t n);
    static EventSpec card_window(std::int64_t n, std::int64_t width);
    static EventSpec mark_count(DegreeSet set, std::int64_t n,
                                std::optional<std::int64_t> width = 1);
    static EventSpec generation_size(std::int64_t generation, std::int64_t count);

    std::int64_t value_of(const Tree& t) const;
    bool matches(const Tree& t) const;

    // Card bound C with event subset of {Card <= C}, when one can be
    // certified from the offspring support; nullopt otherwise.
    std::optional<std::int64_t> card_bound(const OffspringDistribution& p) const;

    // For point Card events: move n to the nearest point of the span lattice
    // d m + 1.  Returns the original n when a snap happened.
    std::optional<std::int64_t> snap_to_lattice(const OffspringDistribution& p);

    std::string to_string() const;
};

}  // namespace gwt
