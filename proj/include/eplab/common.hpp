#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eplab {

// Thrown when a request exceeds the configured enumeration/storage limits.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when an input is structurally valid but mathematically unusable
// (reducible chain, non-positive rate, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown by file/JSON ingestion.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Desk-scale limits. Everything is exact and dense, so the caps keep memory
// and enumeration predictable.
struct Caps {
    int max_coords = 16;
    std::uint64_t max_total_size = std::uint64_t{1} << 26;
    std::uint64_t max_enumeration = 100'000'000ull;
};

// Masses below this are treated as zero and excluded from the support
// before any logarithm is taken.
inline constexpr double kAtomFloor = 1e-15;

// Subset of coordinates {1..k}; coordinate i maps to bit (i-1).
using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval at 95% (z = Phi^{-1}(0.975)).
WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials);

}  // namespace eplab
