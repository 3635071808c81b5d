#include "gwt/events.hpp"

#include <algorithm>
#include <sstream>

namespace gwt {

std::string functional_name(Functional f) {
    switch (f) {
        case Functional::Height: return "height";
        case Functional::Card: return "card";
        case Functional::OutDegreeCount: return "outdegree_count";
        case Functional::GenerationSize: return "generation_size";
    }
    return "?";
}

EventSpec EventSpec::height_at_least(std::int64_t n) {
    EventSpec e;
    e.functional = Functional::Height;
    e.n = n;
    e.width = std::nullopt;
    return e;
}

EventSpec EventSpec::height_exactly(std::int64_t n) {
    EventSpec e;
    e.functional = Functional::Height;
    e.n = n;
    e.width = 1;
    return e;
}

EventSpec EventSpec::card_exactly(std::int64_t n) {
    EventSpec e;
    e.functional = Functional::Card;
    e.n = n;
    e.width = 1;
    return e;
}

EventSpec EventSpec::card_window(std::int64_t n, std::int64_t width) {
    EventSpec e;
    e.functional = Functional::Card;
    e.n = n;
    e.width = width;
    return e;
}

EventSpec EventSpec::mark_count(DegreeSet set, std::int64_t n, std::optional<std::int64_t> width) {
    EventSpec e;
    e.functional = Functional::OutDegreeCount;
    e.degree_set = std::move(set);
    e.n = n;
    e.width = width;
    return e;
}

EventSpec EventSpec::generation_size(std::int64_t generation, std::int64_t count) {
    EventSpec e;
    e.functional = Functional::GenerationSize;
    e.generation = generation;
    e.n = count;
    e.width = 1;
    return e;
}

std::int64_t EventSpec::value_of(const Tree& t) const {
    switch (functional) {
        case Functional::Height: return t.height();
        case Functional::Card: return static_cast<std::int64_t>(t.card());
        case Functional::OutDegreeCount: return t.count_outdegree(degree_set);
        case Functional::GenerationSize: return t.generation_size(generation);
    }
    throw DomainError("unknown functional");
}

bool EventSpec::matches(const Tree& t) const {
    std::int64_t v = value_of(t);
    if (v < n) return false;
    return !width || v < n + *width;
}

std::optional<std::int64_t> EventSpec::card_bound(const OffspringDistribution& p) const {
    if (!width) return std::nullopt;
    std::int64_t top = n + *width - 1;  // largest admissible functional value
    std::int64_t kmax = p.max_degree();
    switch (functional) {
        case Functional::Card:
            return top;
        case Functional::Height: {
            // Height < n+width and degrees <= kmax bound the node count.
            if (kmax <= 1) return top + 1;
            double bound = 1.0, layer = 1.0;
            for (std::int64_t g = 0; g < top; ++g) {
                layer *= static_cast<double>(kmax);
                bound += layer;
                if (bound > 9e15) return std::nullopt;  // formally bounded, uselessly large
            }
            return static_cast<std::int64_t>(bound);
        }
        case Functional::OutDegreeCount: {
            // Unbounded when unary chains avoid the set, or when leaves and
            // some positive degree both avoid it.
            bool one_in_supp_off_set = p(1) > 0.0 && !degree_set.contains(1);
            if (one_in_supp_off_set) return std::nullopt;
            bool zero_in_set = degree_set.contains(0);
            bool off_set_positive = false;
            for (std::int64_t k = 1; k <= kmax; ++k)
                if (p(k) > 0.0 && !degree_set.contains(k)) off_set_positive = true;
            if (!zero_in_set && off_set_positive) return std::nullopt;
            if (!zero_in_set) return 1 + kmax * top;  // internals all carry marks
            // zero_in_set: leaves are marked, internals are marked or >= 2.
            return 3 * top + 2;
        }
        case Functional::GenerationSize:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::int64_t> EventSpec::snap_to_lattice(const OffspringDistribution& p) {
    if (functional != Functional::Card || !width || *width != 1) return std::nullopt;
    std::int64_t d = p.span();
    if (d <= 0) d = 1;
    if ((n - 1) % d == 0) return std::nullopt;
    std::int64_t m = (n - 1 + d / 2) / d;  // nearest lattice index
    std::int64_t snapped = d * m + 1;
    if (snapped < 1) snapped = 1;
    std::int64_t original = n;
    n = snapped;
    return original;
}

std::string EventSpec::to_string() const {
    std::ostringstream os;
    os << functional_name(functional);
    if (functional == Functional::OutDegreeCount) os << "[" << degree_set.to_string() << "]";
    if (functional == Functional::GenerationSize) {
        os << "(gen " << generation << ")=" << n;
        return os.str();
    }
    if (width && *width == 1)
        os << "=" << n;
    else if (width)
        os << " in [" << n << "," << n + *width << ")";
    else
        os << ">=" << n;
    return os.str();
}

}  // namespace gwt
