#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace deanon {

/// Seedable generator with platform-independent output.
///
/// std::mt19937_64's raw stream is fixed by the standard, but the
/// std::*_distribution adaptors are not; every draw here is derived from the
/// raw 64-bit stream by hand so a seed reproduces the same instance on any
/// toolchain.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Child seed for the k-th independent stream derived from a base seed (splitmix64).
    static std::uint64_t derive(std::uint64_t base, std::uint64_t k) {
        std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (k + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace deanon
