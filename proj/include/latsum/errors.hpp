#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace latsum {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Value is indistinguishable from a rational at working precision.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A denominator of the lattice sum is too close to zero.
class NearResonanceError : public std::runtime_error {
public:
    NearResonanceError(int coordinate, std::int64_t layer)
        : std::runtime_error("near resonance: coordinate " + std::to_string(coordinate + 1) +
                             " at m_d = " + std::to_string(layer)),
          coordinate(coordinate), layer(layer)
    {
    }
    int coordinate;
    std::int64_t layer;
};

// Enumeration would exceed the configured point cap.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, double cap, double estimate)
        : std::runtime_error(what + " (cap " + std::to_string(cap) + ", estimated " +
                             std::to_string(estimate) + ")"),
          cap(cap), estimate(estimate)
    {
    }
    double cap;
    double estimate;
};

// No solution found below the search cap.
class SearchCapError : public std::runtime_error {
public:
    explicit SearchCapError(std::int64_t cap, const std::string& where = "")
        : std::runtime_error("no solution with m <= " + std::to_string(cap) + (where.empty() ? "" : " for " + where)),
          cap(cap), where(where)
    {
    }
    std::int64_t cap;
    std::string where;
};

class UnsupportedCutoff : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace latsum
