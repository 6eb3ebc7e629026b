#pragma once

#include <cmath>
#include <cstdint>

namespace sparseset {

// Deterministic RNG with a fixed bit-level mapping to doubles, so datasets
// and training runs are byte-identical across standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // warm up; splitmix64 scrambles even tiny seeds
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // integer uniform on [0, n)
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    // standard normal, Box-Muller
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double gaussian(double mean, double std) { return mean + std * gaussian(); }

private:
    std::uint64_t state_;
};

// Stable child-seed derivation: generation order must not depend on which
// trajectory is produced first.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed;
    auto mix = [&z](std::uint64_t v) {
        z ^= v + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
    };
    mix(stream);
    mix(index);
    return z;
}

} // namespace sparseset
