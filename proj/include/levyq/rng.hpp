#pragma once

#include <cstdint>

// Deterministic random number generation. The engine is xoshiro256++ seeded
// through SplitMix64; every Monte Carlo path owns a substream derived from
// (seed, path index), so results are bit-identical for a given seed no matter
// how the paths are partitioned across threads. All distributions are
// implemented here rather than taken from <random>, whose algorithms differ
// between standard libraries.

namespace levyq {

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Substream for one unit of work: mixes the stream index into the seed.
    static Rng substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();

    /// Uniform on (0, 1), never returning exactly 0 or 1.
    double uniform();

    /// Standard normal via polar rejection (one cached value).
    double normal();

    /// Gamma(shape, scale) by Marsaglia-Tsang, with the U^(1/shape) boost
    /// for shape < 1. shape = 0 returns 0.
    double gamma(double shape, double scale);

    /// Exponential with the given rate.
    double exponential(double rate);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace levyq
