#ifndef IMMINDEX_RNG_HPP
#define IMMINDEX_RNG_HPP

#include <cstdint>
#include <random>

namespace immindex {

/// Seeded 64-bit PRNG with portable uniform doubles. std::mt19937_64 output
/// is specified bit-exactly by the standard; the double mapping below avoids
/// std::uniform_real_distribution, whose stream differs between standard
/// library implementations. Reports built from this generator are therefore
/// byte-identical across toolchains for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace immindex

#endif
