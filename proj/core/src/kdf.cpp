#include "zkpeap/kdf.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>

namespace zkpeap {
namespace {

constexpr std::size_t kDigestSize = 32;

std::vector<uint8_t> iterated_hash_digest(std::span<const uint8_t> password,
                                          std::span<const uint8_t> salt,
                                          uint32_t iterations) {
    std::vector<uint8_t> buf;
    buf.reserve(salt.size() + password.size());
    buf.insert(buf.end(), salt.begin(), salt.end());
    buf.insert(buf.end(), password.begin(), password.end());
    std::vector<uint8_t> digest = sha256(buf);
    for (uint32_t i = 1; i < iterations; ++i) {
        digest = sha256(digest);
    }
    return digest;
}

std::vector<uint8_t> scrypt_digest(std::span<const uint8_t> password,
                                   std::span<const uint8_t> salt,
                                   uint32_t log2_n, uint32_t r, uint32_t p) {
    std::vector<uint8_t> digest(kDigestSize);
    const uint64_t n = uint64_t{1} << log2_n;
    const int rc = EVP_PBE_scrypt(
        reinterpret_cast<const char*>(password.data()), password.size(),
        salt.data(), salt.size(), n, r, p, /*maxmem=*/0, digest.data(),
        digest.size());
    if (rc != 1) {
        throw KdfError("scrypt derivation failed");
    }
    return digest;
}

}  // namespace

KdfConfig KdfConfig::iterated_hash(uint32_t iterations) {
    return KdfConfig{KdfAlgorithm::IteratedHash, {iterations}};
}

KdfConfig KdfConfig::scrypt_default() {
    return KdfConfig{KdfAlgorithm::Scrypt, {14, 8, 1}};
}

void KdfConfig::validate() const {
    switch (algorithm) {
        case KdfAlgorithm::IteratedHash: {
            if (params.size() != 1) {
                throw KdfError("iterated-hash: expected one parameter");
            }
            const uint32_t iterations = params[0];
            if (iterations < 1 || iterations > (1u << 24)) {
                throw KdfError("iterated-hash: iterations out of bounds");
            }
            return;
        }
        case KdfAlgorithm::Scrypt: {
            if (params.size() != 3) {
                throw KdfError("scrypt: expected three parameters");
            }
            const uint32_t log2_n = params[0];
            const uint32_t r = params[1];
            const uint32_t p = params[2];
            if (log2_n < 10 || log2_n > 22) {
                throw KdfError("scrypt: log2(N) out of bounds");
            }
            if (r < 1 || r > 32 || p < 1 || p > 16) {
                throw KdfError("scrypt: r/p out of bounds");
            }
            return;
        }
    }
    throw KdfError("unregistered KDF id");
}

std::vector<uint8_t> kdf_digest(const KdfConfig& config,
                                std::span<const uint8_t> password,
                                std::span<const uint8_t> salt) {
    config.validate();
    switch (config.algorithm) {
        case KdfAlgorithm::IteratedHash:
            return iterated_hash_digest(password, salt, config.params[0]);
        case KdfAlgorithm::Scrypt:
            return scrypt_digest(password, salt, config.params[0],
                                 config.params[1], config.params[2]);
    }
    throw KdfError("unregistered KDF id");
}

std::vector<uint8_t> sha256(std::span<const uint8_t> data) {
    std::vector<uint8_t> digest(kDigestSize);
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len,
                   EVP_sha256(), nullptr) != 1 ||
        len != kDigestSize) {
        throw KdfError("SHA-256 failed");
    }
    return digest;
}

}  // namespace zkpeap
