#pragma once

#include "zkpeap/nat.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace zkpeap {

/// Explicit randomness source. Every operation that needs randomness takes
/// one of these, so protocol runs are reproducible under a fixed seed and
/// concurrent sessions can each own an independent stream.
///
/// Backed by mt19937_64, which is not a CSPRNG; see the README for the
/// threat-model discussion.
class RandomSource {
public:
    static RandomSource seeded(uint64_t seed);

    // Seeded from the operating system entropy pool.
    static RandomSource system();

    uint64_t next_u64();

    // Uniform bit, for challenge generation.
    uint8_t next_bit();

    std::vector<uint8_t> bytes(std::size_t count);

    // Uniform value in [0, bound) by rejection sampling; bound must be >= 1.
    Nat below(const Nat& bound);

private:
    explicit RandomSource(std::mt19937_64 gen) : gen_(gen) {}

    std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent per-trial seeds from a
// user-facing seed without correlated streams.
uint64_t mix_seed(uint64_t a, uint64_t b);

}  // namespace zkpeap
