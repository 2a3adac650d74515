#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace klm3d {

// splitmix64 generator. Used instead of <random> engines so seeded scenarios
// and simulated logs are bit-identical across platforms and so per-trial
// substreams can be derived by counter (order-independent, which is what lets
// the parallel simulation kernel match the serial one exactly).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Substream for (seed, stream): one mixing round keeps nearby stream ids
    // decorrelated.
    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 rng(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        rng.next();
        return rng;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Box-Muller; consumes two uniforms per call.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Fisher-Yates support: integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

private:
    std::uint64_t state_;
};

} // namespace klm3d
