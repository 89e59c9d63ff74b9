// Explicit, seedable and splittable random streams. Nothing in the library
// touches global randomness; every stochastic operation takes a stream.

#pragma once

#include <cstdint>
#include <random>

namespace craterloc {

class RngStream {
public:
    using Engine = std::mt19937_64;

    explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(make_engine(seed)) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Independent child stream, a pure function of (this seed, key...).
    /// Does not advance this stream.
    template <typename... Keys>
    [[nodiscard]] RngStream split(Keys... keys) const {
        return RngStream(mix(seed_, static_cast<std::uint64_t>(keys)...));
    }

    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// One standard normal variate. A fresh distribution per call keeps
    /// draws independent of any cached pair state.
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    double normal(double mean, double sigma) {
        return sigma == 0.0 ? mean : mean + sigma * normal();
    }

    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<int>(mean)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    Engine& engine() noexcept { return engine_; }

private:
    static std::uint64_t splitmix(std::uint64_t z) noexcept {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    template <typename... Rest>
    static std::uint64_t mix(std::uint64_t acc, Rest... rest) noexcept {
        ((acc = splitmix(acc ^ splitmix(rest + 0x632BE59BD9B4E019ULL))), ...);
        return acc;
    }

    static Engine make_engine(std::uint64_t seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        return Engine(seq);
    }

    std::uint64_t seed_;
    Engine engine_;
};

}  // namespace craterloc
