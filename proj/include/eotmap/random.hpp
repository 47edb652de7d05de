#ifndef EOTMAP_RANDOM_HPP
#define EOTMAP_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace eotmap {

/**
 * @brief Counter-based generator: draw number c of a stream is a pure
 * function of (seed, stream, c).
 *
 * The mixing function is the SplitMix64 finalizer evaluated at the state the
 * sequential SplitMix64 generator would reach after c steps. Because any
 * draw can be computed independently, generation can be split across
 * threads without changing a single bit of the output.
 */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + kGamma))) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const { return lo + (hi - lo) * uniform(counter); }

    /// Standard normal by Box-Muller; consumes counters 2c and 2c + 1.
    double normal(std::uint64_t counter) const {
        const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
};

/// Sequential view over a CounterRng, for algorithms that just need "the next draw".
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

    double uniform() { return rng_.uniform(next_++); }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        const auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
        return v < bound ? v : bound - 1;
    }

private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
};

}  // namespace eotmap

#endif  // EOTMAP_RANDOM_HPP
