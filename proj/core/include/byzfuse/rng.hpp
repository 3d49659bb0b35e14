#ifndef BYZFUSE_RNG_HPP
#define BYZFUSE_RNG_HPP

#include <array>
#include <cstdint>

namespace byzfuse {

/// Deterministic seeded stream (xoshiro256++ seeded through splitmix64).
/// Identical seeds produce identical byte streams on every platform: all
/// draws are pure integer/compare operations. Child streams fork from the
/// stored seed key, not the stream position, so fork order never matters.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double next_double();
    bool bernoulli(double p) { return next_double() < p; }
    /// Uniform integer in [0, bound), unbiased (rejection sampling).
    std::uint64_t uniform_below(std::uint64_t bound);
    /// Uniform double in [-a, a].
    double symmetric_uniform(double a);

    /// Independent child stream addressed by a path of indices.
    Rng fork(std::uint64_t a) const;
    Rng fork(std::uint64_t a, std::uint64_t b) const;
    Rng fork(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;

    std::uint64_t seed_key() const { return seed_; }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace byzfuse

#endif
