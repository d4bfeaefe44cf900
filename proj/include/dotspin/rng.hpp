// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cmath>

namespace dotspin::rng {

// Counter-based generator: every value is a pure function of (key, counter),
// so independent streams can be drawn in any order, from any thread, and an
// ensemble member is reproducible from its (seed, index) pair alone.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child seed, e.g. for ensemble member i of a base seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream * 0xda442d24da2e3f6bULL));
}

class Counter {
public:
    Counter(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed) ^ (0x6a09e667f3bcc909ULL + stream))) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(ctr_++)); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller; draws exactly two uniforms per pair.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 1e-300) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dotspin::rng
