#include "zkpeap/rng.hpp"

#include <stdexcept>

namespace zkpeap {

RandomSource RandomSource::seeded(uint64_t seed) {
    return RandomSource(std::mt19937_64(seed));
}

RandomSource RandomSource::system() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return RandomSource(std::mt19937_64(seq));
}

uint64_t RandomSource::next_u64() {
    return gen_();
}

uint8_t RandomSource::next_bit() {
    return static_cast<uint8_t>(gen_() & 1u);
}

std::vector<uint8_t> RandomSource::bytes(std::size_t count) {
    std::vector<uint8_t> out;
    out.reserve(count);
    uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 8 == 0) {
            word = gen_();
        }
        out.push_back(static_cast<uint8_t>(word & 0xFF));
        word >>= 8;
    }
    return out;
}

Nat RandomSource::below(const Nat& bound) {
    if (bound < 1) {
        throw std::invalid_argument("RandomSource::below: bound must be >= 1");
    }
    const std::size_t bits = bit_length(bound);
    const std::size_t words = (bits + 63) / 64;
    const std::size_t top_bits = bits - (words - 1) * 64;
    const uint64_t top_mask =
        top_bits == 64 ? ~uint64_t{0} : ((uint64_t{1} << top_bits) - 1);

    // Expected < 2 draws: the masked candidate is uniform in [0, 2^bits).
    for (;;) {
        Nat candidate = 0;
        for (std::size_t i = 0; i < words; ++i) {
            uint64_t w = gen_();
            if (i == 0) {
                w &= top_mask;
            }
            candidate <<= 64;
            candidate |= w;
        }
        if (candidate < bound) {
            return candidate;
        }
    }
}

uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace zkpeap
