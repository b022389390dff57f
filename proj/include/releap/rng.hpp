#pragma once
// Deterministic random streams. The engine is std::mt19937_64 (bit-exact by
// the standard); the distributions are implemented here instead of going
// through <random> adaptors, whose output differs between standard library
// implementations. Streams are split by hashing (seed, tag) pairs so that
// parallel consumers stay independent of scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "releap/errors.hpp"

namespace releap {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a seed together with up to two stream tags. Used everywhere a module
// needs its own stream derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t state = seed ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t h = splitmix64(state);
    state = h ^ a;
    h = splitmix64(state);
    if (b != 0) {
        state = h ^ b;
        h = splitmix64(state);
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Independent child stream. Depends only on (constructor seed, tag), not
    // on how much the parent has been consumed.
    Rng child(std::uint64_t tag) const { return Rng(derive_seed(seed_, tag)); }
    Rng child(std::uint64_t tag_a, std::uint64_t tag_b) const {
        return Rng(derive_seed(seed_, tag_a, tag_b));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw PreconditionError("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal, Box-Muller with a cached second variate.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) {
        if (rate <= 0.0) throw PreconditionError("exponential: rate must be positive");
        return -std::log(1.0 - uniform()) / rate;
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; boosted for shape < 1.
    double gamma(double shape) {
        if (shape <= 0.0) throw PreconditionError("gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

    // Fisher-Yates. std::shuffle is left alone because its draw pattern is
    // implementation-defined.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace releap
