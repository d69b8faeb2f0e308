#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace baskets {

// SplitMix64 finalizer (Steele, Lea & Flood / Vigna).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Derives a child seed from a master seed and an id path, e.g.
// (scenario, replication, basket, patient). Any prefix change yields an
// unrelated stream, so an individual patient's trajectory is reproducible
// in isolation.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master + kGoldenGamma);
    for (std::uint64_t id : path) {
        s = mix64((s + kGoldenGamma) ^ mix64(id + kGoldenGamma));
    }
    return s;
}

// Counter-based SplitMix64 stream. All distribution code is written here
// rather than taken from <random> so draw sequences are bitwise identical
// across platforms and standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    static RngStream derive(std::uint64_t master,
                            std::initializer_list<std::uint64_t> path) {
        return RngStream(derive_seed(master, path));
    }

    std::uint64_t next_u64() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (no cached second value).
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925287 * u2);
    }

    // Gamma(shape, rate) by Marsaglia-Tsang squeeze, boosted for shape < 1.
    double gamma(double shape, double rate) {
        if (shape < 1.0) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v / rate;
        }
    }

    // Index draw from a probability vector; returns the last positive-mass
    // index if rounding pushes the cumulative sum below 1.
    int categorical(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        int last_positive = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] > 0.0) last_positive = static_cast<int>(i);
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return last_positive;
    }

private:
    std::uint64_t state_;
};

} // namespace baskets
