#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

#include "cidbench/core.hpp"

namespace cidbench {

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Reproducible generator: mt19937_64 (its output sequence is fixed by the
/// C++ standard) with distributions implemented here rather than taken from
/// <random>, whose distribution algorithms differ between standard libraries.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent generator for a named sub-task of the same run.
    SeededRng substream(std::uint64_t stream_id) const {
        return SeededRng(splitmix64(seed_ ^ splitmix64(stream_id + 0x5851F42D4C957F2DULL)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); Lemire-style rejection keeps it unbiased.
    std::size_t below(std::size_t n) {
        require(n > 0, "SeededRng::below needs n > 0");
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return static_cast<std::size_t>(r % bound);
            }
        }
    }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal via Box-Muller (no cached second value, so the stream
    /// position depends only on the number of calls).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace cidbench
