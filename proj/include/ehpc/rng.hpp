#pragma once

#include <cstdint>
#include <random>

namespace ehpc {

/// Seeded random stream, splittable by (seed, stream index).
///
/// Streams with the same seed and different indices are statistically
/// independent; the same (seed, stream) pair always reproduces the same
/// sequence on every platform (mt19937_64 and seed_seq are fully specified).
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace ehpc
