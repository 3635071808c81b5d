#pragma once

#include <stdexcept>
#include <string>

namespace gwt {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A degree sequence that does not encode a tree (partial sums dip too early
// or do not end at -1).
struct MalformedEncoding : Error {
    using Error::Error;
};

// A degree set that is empty where a nonempty one is required.
struct EmptySet : Error {
    using Error::Error;
};

// A node label that was expected to be a leaf of the host tree.
struct NotALeaf : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Tilt parameter outside the validity interval of the tilted family.
struct OutsideInterval : Error {
    using Error::Error;
};

// Tail series of a tilted family still growing at the truncation cut.
struct SeriesDivergence : Error {
    using Error::Error;
};

// Offspring mean above one where a (sub)critical law is required.
struct Supercritical : Error {
    using Error::Error;
};

// Deterministic work guard exceeded (enumeration size, node count, ...).
struct BudgetExceeded : Error {
    using Error::Error;
};

// Rejection sampler ran out of attempts.
struct RejectionBudgetExceeded : Error {
    using Error::Error;
};

// A sampler budget that could bias the conditioned law instead of merely
// bounding work.
struct InconsistentBudget : Error {
    using Error::Error;
};

// Requested total progeny off the span lattice (probability zero).
struct LatticeMiss : Error {
    using Error::Error;
};

// Conditioning event carries no probability mass.
struct ZeroMassEvent : Error {
    using Error::Error;
};

// Exact conditioned computation would silently truncate event mass.
struct TruncationRefused : Error {
    using Error::Error;
};

// Transform applied to a tree with no marked node (L_A empty).
struct EmptyMark : Error {
    using Error::Error;
};

// Bad run configuration (CLI / JSON input).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gwt
