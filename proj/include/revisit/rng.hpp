#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace revisit {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Seeded, splittable random source. All generator randomness flows from one
/// master seed; child streams are derived by index so distinct pairs never
/// share a sequence. Uniform doubles are built from raw 64-bit draws rather
/// than std::uniform_real_distribution, which keeps output identical across
/// standard library implementations.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : gen_(detail::splitmix64(seed)) {}

    /// Seed for substream `index` of a master seed; composes for nested splits.
    static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
        return detail::splitmix64(master_seed) ^ detail::splitmix64(~index);
    }

    /// Independent stream for substream `index` of the same master seed.
    static SplitRng child(std::uint64_t master_seed, std::uint64_t index) {
        return SplitRng(derive_seed(master_seed, index));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform integer on [a, b], inclusive.
    std::int64_t uniform_int(std::int64_t a, std::int64_t b) {
        const std::uint64_t range = static_cast<std::uint64_t>(b - a) + 1;
        if (range == 0) return static_cast<std::int64_t>(gen_());  // full 64-bit span
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x > limit);
        return a + static_cast<std::int64_t>(x % range);
    }

    /// Exponential with the given rate, by inverse CDF.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    std::mt19937_64 gen_;
};

}  // namespace revisit
