#pragma once

// Deterministic random streams.
//
// Every random quantity in a campaign is drawn from an MT19937-64 engine
// (bit-exact across standard libraries) seeded with a stream seed obtained by
// mixing (parent seed, stream id, index) through SplitMix64. Real numbers are
// formed from the top 53 bits of each draw, never through <random>
// distributions, whose algorithms are implementation-defined.

#include <cstdint>
#include <random>

namespace gapbench {

enum class Stream : std::uint64_t {
    Map = 1,         // master -> per-map seed
    Trial = 2,       // master -> per-trial seed
    PoissonSites = 3,
    Obstacles = 4,
    PoissonRadius = 5,
    TrialSampling = 6,
};

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream,
                                                  std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(parent);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return splitmix64(h ^ index);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace gapbench
