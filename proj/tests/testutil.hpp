#pragma once
// Shared helpers for the test suites: seeded random sampling and tolerance
// comparisons used by the property tests.

#include <cmath>
#include <complex>
#include <random>

namespace testutil {

inline std::mt19937_64 rng(uint64_t seed = 0x5eed5eedULL) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

// |x - y| <= tol * max(1, |x|, |y|)
inline bool close_rel(double x, double y, double tol = 1e-12) {
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

inline bool close_abs(double x, double y, double tol) { return std::abs(x - y) <= tol; }

} // namespace testutil
