#include "zkpeap/credential.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace zkpeap {
namespace {

constexpr char kMagic[4] = {'Z', 'K', 'P', 'R'};
constexpr uint8_t kFormatVersion = 1;

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

[[noreturn]] void malformed(const std::string& detail) {
    throw RegistryError(RegistryErrorKind::MalformedFile,
                        "registry: " + detail);
}

struct Reader {
    std::span<const uint8_t> data;
    std::size_t pos = 0;

    uint8_t u8() {
        if (pos + 1 > data.size()) {
            malformed("truncated file");
        }
        return data[pos++];
    }
    uint16_t u16() {
        const uint16_t hi = u8();
        return static_cast<uint16_t>((hi << 8) | u8());
    }
    uint32_t u32() {
        const uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::span<const uint8_t> take(std::size_t count) {
        if (pos + count > data.size()) {
            malformed("truncated file");
        }
        auto out = data.subspan(pos, count);
        pos += count;
        return out;
    }
    bool done() const { return pos == data.size(); }
};

void put_nat(std::vector<uint8_t>& out, const Nat& value) {
    const std::vector<uint8_t> bytes = nat_to_bytes(value);
    if (bytes.size() > 0xFFFF) {
        malformed("integer too large to serialize");
    }
    put_u16(out, static_cast<uint16_t>(bytes.size()));
    out.insert(out.end(), bytes.begin(), bytes.end());
}

Nat read_nat(Reader& r) {
    const uint16_t len = r.u16();
    if (len == 0) {
        malformed("empty integer field");
    }
    const auto bytes = r.take(len);
    if (len > 1 && bytes[0] == 0) {
        malformed("non-canonical integer encoding");
    }
    return nat_from_bytes(bytes);
}

// Load-time invariant checks; a record that fails them is treated as file
// corruption rather than admitted into the registry.
void validate_record(const CredentialRecord& record) {
    if (record.identity.empty()) {
        malformed("empty identity");
    }
    try {
        record.kdf.validate();
    } catch (const KdfError& e) {
        malformed(e.what());
    }
    if (record.rounds < 1) {
        malformed("rounds must be >= 1");
    }
    const Nat& n = record.n.value();
    if (record.x < 1 || record.x >= n || gcd(record.x, n) != 1 ||
        jacobi(record.x, record.n) != 1) {
        malformed("credential residue fails instance invariants");
    }
}

}  // namespace

Salt Salt::from_bytes(std::vector<uint8_t> bytes) {
    if (bytes.size() < kMinLength || bytes.size() > kMaxLength) {
        throw std::invalid_argument("salt length must be in [4, 255]");
    }
    return Salt(std::move(bytes));
}

Salt Salt::random(std::size_t length, RandomSource& rng) {
    return from_bytes(rng.bytes(length));
}

PublicInstance CredentialRecord::instance() const {
    return make_instance(n, x);
}

Witness stretch(std::string_view password, const Salt& salt,
                const KdfConfig& kdf, const Modulus& n) {
    if (password.empty()) {
        throw std::invalid_argument("stretch: password must be non-empty");
    }
    std::vector<uint8_t> message(password.begin(), password.end());
    for (uint32_t attempt = 1;; ++attempt) {
        const std::vector<uint8_t> digest =
            kdf_digest(kdf, message, salt.bytes());
        Nat w = nat_from_bytes(digest) % n.value();
        if (w >= 2 && gcd(w, n.value()) == 1) {
            return Witness{std::move(w)};
        }
        message.assign(password.begin(), password.end());
        message.push_back(0x00);
        put_u32(message, attempt);
    }
}

CredentialRecord enroll(std::string identity, std::string_view password,
                        const EnrollmentConfig& config, RandomSource& rng) {
    if (identity.empty()) {
        throw std::invalid_argument("enroll: identity must be non-empty");
    }
    Salt salt = Salt::random(config.salt_length, rng);
    SemiprimeParts semiprime = gen_semiprime(config.modulus_bits, rng);
    // p and q go out of scope here and are never stored anywhere.
    const Witness witness = stretch(password, salt, config.kdf, semiprime.n);
    Nat x = mod_sq(witness.w, semiprime.n);
    return CredentialRecord{std::move(identity), std::move(salt),
                            std::move(x),        std::move(semiprime.n),
                            config.kdf,          config.rounds};
}

void Registry::add(CredentialRecord record) {
    auto [it, inserted] = records_.try_emplace(record.identity, record);
    if (!inserted) {
        throw RegistryError(RegistryErrorKind::DuplicateIdentity,
                            "registry: duplicate identity " + record.identity);
    }
}

const CredentialRecord* Registry::find(std::string_view identity) const {
    const auto it = records_.find(identity);
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<uint8_t> Registry::serialize() const {
    std::vector<uint8_t> out(kMagic, kMagic + 4);
    out.push_back(kFormatVersion);
    put_u32(out, static_cast<uint32_t>(records_.size()));
    for (const auto& [identity, record] : records_) {
        put_u16(out, static_cast<uint16_t>(identity.size()));
        out.insert(out.end(), identity.begin(), identity.end());
        out.push_back(static_cast<uint8_t>(record.salt.size()));
        const auto salt = record.salt.bytes();
        out.insert(out.end(), salt.begin(), salt.end());
        out.push_back(static_cast<uint8_t>(record.kdf.algorithm));
        out.push_back(static_cast<uint8_t>(record.kdf.params.size()));
        for (uint32_t param : record.kdf.params) {
            put_u32(out, param);
        }
        put_u16(out, record.rounds);
        put_nat(out, record.n.value());
        put_nat(out, record.x);
    }
    return out;
}

Registry Registry::deserialize(std::span<const uint8_t> bytes) {
    Reader r{bytes};
    const auto magic = r.take(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) {
        malformed("bad magic");
    }
    const uint8_t version = r.u8();
    if (version != kFormatVersion) {
        throw RegistryError(RegistryErrorKind::VersionMismatch,
                            "registry: unsupported format version " +
                                std::to_string(version));
    }
    const uint32_t count = r.u32();
    Registry registry;
    for (uint32_t i = 0; i < count; ++i) {
        const uint16_t id_len = r.u16();
        const auto id_bytes = r.take(id_len);
        std::string identity(id_bytes.begin(), id_bytes.end());

        const uint8_t salt_len = r.u8();
        if (salt_len < Salt::kMinLength) {
            malformed("salt length out of range");
        }
        const auto salt_bytes = r.take(salt_len);

        const auto algorithm = static_cast<KdfAlgorithm>(r.u8());
        const uint8_t param_count = r.u8();
        std::vector<uint32_t> params;
        params.reserve(param_count);
        for (uint8_t j = 0; j < param_count; ++j) {
            params.push_back(r.u32());
        }

        const uint16_t rounds = r.u16();
        Nat n_value = read_nat(r);
        if (n_value < 3 || (n_value & 1) == 0) {
            malformed("modulus must be odd and >= 3");
        }
        Nat x = read_nat(r);

        CredentialRecord record{
            std::move(identity),
            Salt::from_bytes({salt_bytes.begin(), salt_bytes.end()}),
            std::move(x),
            Modulus{std::move(n_value)},
            KdfConfig{algorithm, std::move(params)},
            rounds};
        validate_record(record);
        registry.add(std::move(record));
    }
    if (!r.done()) {
        malformed("trailing bytes after last record");
    }
    return registry;
}

Registry Registry::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        malformed("cannot open " + path.string());
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

void Registry::store(const std::filesystem::path& path) const {
    const std::vector<uint8_t> bytes = serialize();
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("registry: cannot write " + tmp.string());
        }
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw std::runtime_error("registry: write failed " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace zkpeap
