#pragma once

#include "zkpeap/kdf.hpp"
#include "zkpeap/zkp.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace zkpeap {

/// Public per-credential salt, 4 to 255 octets (the wire format's salt
/// length field is a single octet, and shorter salts are rejected).
class Salt {
public:
    static constexpr std::size_t kMinLength = 4;
    static constexpr std::size_t kMaxLength = 255;

    // Throws std::invalid_argument outside [4, 255].
    static Salt from_bytes(std::vector<uint8_t> bytes);

    static Salt random(std::size_t length, RandomSource& rng);

    std::span<const uint8_t> bytes() const { return bytes_; }
    std::size_t size() const { return bytes_.size(); }

    friend bool operator==(const Salt&, const Salt&) = default;

private:
    explicit Salt(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)) {}

    std::vector<uint8_t> bytes_;
};

/// What the authenticator stores per identity. Witness material (the root w,
/// the password) is never part of a record.
struct CredentialRecord {
    std::string identity;
    Salt salt;
    Nat x;       // quadratic residue, x = w^2 mod n
    Modulus n;   // semiprime modulus
    KdfConfig kdf;
    uint16_t rounds;  // m, verification rounds demanded for this identity

    PublicInstance instance() const;
};

/// Derives the root w = H(password, salt) and maps the digest into Z_n^*:
/// the digest bytes are read as a big-endian integer and reduced mod n; if
/// the result is 0, 1, or shares a factor with n, the derivation is retried
/// with a domain-separating counter (0x00 || big-endian attempt number)
/// appended to the password input. Deterministic for fixed inputs.
Witness stretch(std::string_view password, const Salt& salt,
                const KdfConfig& kdf, const Modulus& n);

struct EnrollmentConfig {
    KdfConfig kdf = KdfConfig::scrypt_default();
    unsigned modulus_bits = 512;
    uint16_t rounds = 20;
    std::size_t salt_length = 16;
};

/// Creates a credential: generates a fresh semiprime (discarding the prime
/// factors), stretches the password, and keeps only x = w^2 mod n.
CredentialRecord enroll(std::string identity, std::string_view password,
                        const EnrollmentConfig& config, RandomSource& rng);

enum class RegistryErrorKind {
    MalformedFile,
    VersionMismatch,
    DuplicateIdentity,
};

struct RegistryError : std::runtime_error {
    RegistryError(RegistryErrorKind kind, const std::string& detail)
        : std::runtime_error(detail), kind(kind) {}
    RegistryErrorKind kind;
};

/// The authenticator's identity registry. Read-mostly: sessions share an
/// immutable snapshot, enrollment writes a fresh file with atomic replace.
///
/// File format (all integers big-endian):
///   magic "ZKPR" | version 0x01 | record count u32 | records...
/// Each record:
///   identity   u16 length + UTF-8 bytes
///   salt       u8 length + bytes
///   kdf        u8 algorithm id, u8 parameter count, u32 parameters
///   rounds     u16
///   n, x       u16 length + minimal big-endian bytes each
class Registry {
public:
    // Throws RegistryError{DuplicateIdentity} if the identity exists.
    void add(CredentialRecord record);

    const CredentialRecord* find(std::string_view identity) const;

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

    std::vector<uint8_t> serialize() const;
    static Registry deserialize(std::span<const uint8_t> bytes);

    // store() writes to a temp file in the destination directory and
    // renames it into place.
    static Registry load(const std::filesystem::path& path);
    void store(const std::filesystem::path& path) const;

private:
    std::map<std::string, CredentialRecord, std::less<>> records_;
};

}  // namespace zkpeap
