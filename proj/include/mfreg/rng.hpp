#ifndef MFREG_RNG_HPP
#define MFREG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace mfreg {

/// SplitMix64 step; the backbone of the counter-based substream scheme.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives a substream seed from a master seed and a key path, e.g.
/// mix_seed({master, scenario, N, rep, n, j}). Substreams with distinct key
/// paths are de-correlated, and the derivation never depends on scheduling
/// order, so results are reproducible at any thread count.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = 0x8F1BBCDCB7A56463ULL;
    for (std::uint64_t k : keys)
        s = splitmix64(s ^ k);
    return s;
}

/// Standard normal stream: mt19937_64 (sequence fixed by the C++ standard)
/// plus an explicit Box-Muller transform, so the draws are bit-reproducible
/// across platforms and library versions.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // uniforms in (0,1]; u1 > 0 keeps the log finite
        const double u1 = ((gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = (gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mfreg

#endif
