#pragma once

#include <cstdint>
#include <random>

namespace dds {

// Deterministic RNG used by every randomized suite.  Generator: std::mt19937_64
// (bit-exact across platforms by the standard), seeded through one splitmix64
// scramble so nearby user seeds give unrelated streams.  Variates are derived
// from raw 64-bit draws by hand; std::uniform_*_distribution is
// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform integer in [lo, hi] by rejection (unbiased, portable).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span + 1) % span;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x > limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    int sign() { return (eng_() & 1) ? 1 : -1; }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    std::mt19937_64 eng_;
};

} // namespace dds
