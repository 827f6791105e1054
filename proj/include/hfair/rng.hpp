#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace hfair {

// SplitMix64 finalizer. Also used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Counter-based generator: draw k is mix64(key + k * golden). The standard
// <random> distributions are implementation-defined, so all sampling goes
// through this type to keep outputs identical across toolchains.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix64(seed)) {}

    std::uint64_t next() {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        __extension__ using u128 = unsigned __int128;
        const u128 wide = static_cast<u128>(next()) * n;
        return static_cast<std::size_t>(wide >> 64);
    }

    // Uniform integer in [lo, hi].
    long long integer(long long lo, long long hi) {
        return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    // Box-Muller, cosine branch only: one normal per two uniforms.
    double normal(double mean, double sd) {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace hfair
