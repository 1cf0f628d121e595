#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace pressflow {

// Deterministic RNG used by every seeded operation. The distributions are
// implemented here rather than via std::*_distribution, whose output is not
// pinned by the standard; mt19937_64 itself is.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n), rejection sampled.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller; two uniforms per draw, no cached spare.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::mt19937_64 gen_;
};

// Stable sub-seed for a named purpose (stage seeds derived from the run seed).
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

} // namespace pressflow
