#include "byzfuse/rng.hpp"

#include <stdexcept>

namespace byzfuse {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::symmetric_uniform(double a) {
    return (2.0 * next_double() - 1.0) * a;
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t index) {
    // one splitmix64 step over the xor-combined key
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + (index << 1));
    return splitmix64(x);
}

Rng Rng::fork(std::uint64_t a) const { return Rng(mix(seed_, a)); }
Rng Rng::fork(std::uint64_t a, std::uint64_t b) const { return Rng(mix(mix(seed_, a), b)); }
Rng Rng::fork(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return Rng(mix(mix(mix(seed_, a), b), c));
}

}  // namespace byzfuse
