#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace txlife {

/// Deterministic random source (xoshiro256++ seeded through splitmix64).
///
/// Everything random in the library flows through this type so that a fixed
/// seed reproduces bit-identical results on every platform; the standard
/// <random> distributions are implementation-defined and are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            word = splitmix64(x);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n); unbiased via rejection. n must be > 0.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw = next_u64();
        while (draw >= limit) {
            draw = next_u64();
        }
        return static_cast<std::size_t>(draw % bound);
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

    /// k distinct indices drawn from [0, n) in draw order. Requires k <= n.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) {
            pool[i] = i;
        }
        std::vector<std::size_t> picked;
        picked.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
            picked.push_back(pool[i]);
        }
        return picked;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace txlife
