#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace zkpeap {

/// Registered key-stretching algorithms. Both parties must be configured
/// with the same entry out of band; nothing about the KDF is negotiated on
/// the wire.
enum class KdfAlgorithm : uint8_t {
    /// SHA-256 over (salt || password), then iterated. Deterministic and
    /// cheap; used for test vectors and simulation, not for production.
    IteratedHash = 1,
    /// scrypt (memory-hard). Production default.
    Scrypt = 2,
};

struct KdfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Algorithm id plus its work parameters.
///   IteratedHash: { iterations }                iterations in [1, 2^24]
///   Scrypt:       { log2_n, r, p }              log2_n in [10, 22],
///                                               r in [1, 32], p in [1, 16]
struct KdfConfig {
    KdfAlgorithm algorithm;
    std::vector<uint32_t> params;

    static KdfConfig iterated_hash(uint32_t iterations);
    static KdfConfig scrypt_default();  // N = 2^14, r = 8, p = 1

    // Throws KdfError for an unregistered id or out-of-bounds parameters.
    void validate() const;

    friend bool operator==(const KdfConfig&, const KdfConfig&) = default;
};

// 32-byte stretched digest of (password, salt) under the given config.
std::vector<uint8_t> kdf_digest(const KdfConfig& config,
                                std::span<const uint8_t> password,
                                std::span<const uint8_t> salt);

// SHA-256 convenience used for decoy derivation and tests.
std::vector<uint8_t> sha256(std::span<const uint8_t> data);

}  // namespace zkpeap
