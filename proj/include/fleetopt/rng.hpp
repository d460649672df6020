#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace fleetopt {

// All stochastic behavior flows through the helpers below instead of
// <random> distributions, whose outputs differ between standard library
// implementations. mt19937_64 itself is specified bit-exactly, so results
// are reproducible for a given seed on any platform.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from a master seed and a stream name.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
    return splitmix64(master ^ fnv1a(stream));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index) {
    return splitmix64(derive_seed(master, stream) ^ splitmix64(index));
}

/// Seeded random stream with portable samplers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive, rejection-sampled for exactness.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return lo + static_cast<std::int64_t>(engine_()); // full range
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double lognormal(double median, double sigma) {
        return median * std::exp(sigma * normal());
    }

    /// Poisson count by Knuth's product method; fine for the per-hour rates
    /// used here. Splits large means so the product never underflows.
    std::int64_t poisson(double mean) {
        std::int64_t total = 0;
        while (mean > 32.0) {
            total += poisson_small(32.0);
            mean -= 32.0;
        }
        return total + poisson_small(mean);
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::int64_t>(last - first);
        for (std::int64_t i = n - 1; i > 0; --i) {
            const auto j = uniform_int(0, i);
            std::swap(first[i], first[j]);
        }
    }

  private:
    std::int64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double threshold = std::exp(-mean);
        std::int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > threshold);
        return k - 1;
    }

    std::mt19937_64 engine_;
};

/// One-shot uniform in [0,1) keyed by (seed, tag, id). Used for per-entity
/// attribute draws so consumption order never depends on the solution being
/// simulated (common random numbers across candidate solutions).
inline double keyed_uniform(std::uint64_t seed, std::string_view tag, std::uint64_t id) {
    return static_cast<double>(splitmix64(derive_seed(seed, tag) ^ splitmix64(id)) >> 11) *
           0x1.0p-53;
}

inline double keyed_normal(std::uint64_t seed, std::string_view tag, std::uint64_t id) {
    const std::uint64_t base = derive_seed(seed, tag) ^ splitmix64(id);
    const double u1 = 1.0 - static_cast<double>(splitmix64(base) >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(splitmix64(base + 1) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace fleetopt
