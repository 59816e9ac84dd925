#pragma once

#include "zkpeap/nat.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace zkpeap::eap {

/*
 * EAP frame layout (all multi-octet integers big-endian):
 *
 *   | Code (1) | Identifier (1) | Length (2) | Type (1) | Type-Data ... |
 *
 * Length covers the whole frame and is capped at 2^16 - 1. Success and
 * Failure frames are the 4-octet header alone. This method is Type 84; its
 * type-data starts with a phase octet (1 = setup, 2 = verification)
 * followed by phase data whose shape depends on the direction:
 *
 *   setup request     | salt length (1) | salt (4..255) | modulus (rest) |
 *   setup response    | control value y1 (rest)                         |
 *   verify request    | challenge bit, right-most bit of 1 octet        |
 *   verify response   | proof length (1) | proof z (k) | y_{i+1} (rest) |
 *
 * Integers (modulus, y, z) are minimal big-endian byte strings: no leading
 * zero octet, value 0 as a single zero octet. "Rest" fields derive their
 * size from the EAP length field; there is no inner length for them.
 */

enum class Code : uint8_t {
    Request = 1,
    Response = 2,
    Success = 3,
    Failure = 4,
};

enum class Type : uint8_t {
    Identity = 1,
    Nak = 3,
    Method = 84,
};

inline constexpr uint8_t kMethodType = 84;
inline constexpr std::size_t kHeaderSize = 4;
inline constexpr std::size_t kMaxFrameSize = 0xFFFF;

struct IdentityBody {
    std::string payload;  // request: prompt (may be empty); response: identity

    friend bool operator==(const IdentityBody&, const IdentityBody&) = default;
};

struct NakBody {
    std::vector<uint8_t> desired_types;

    friend bool operator==(const NakBody&, const NakBody&) = default;
};

struct SetupRequest {
    std::vector<uint8_t> salt;  // 4..255 octets
    Nat modulus;

    friend bool operator==(const SetupRequest&, const SetupRequest&) = default;
};

struct SetupResponse {
    Nat control_value;  // y_1

    friend bool operator==(const SetupResponse&, const SetupResponse&) = default;
};

struct VerifyRequest {
    uint8_t bit;  // 0 or 1

    friend bool operator==(const VerifyRequest&, const VerifyRequest&) = default;
};

struct VerifyResponse {
    Nat proof;          // z_i
    Nat control_value;  // y_{i+1}, carried even on the final round

    friend bool operator==(const VerifyResponse&, const VerifyResponse&) = default;
};

using PhasePayload =
    std::variant<SetupRequest, SetupResponse, VerifyRequest, VerifyResponse>;

struct MethodBody {
    PhasePayload phase;

    friend bool operator==(const MethodBody&, const MethodBody&) = default;
};

/// Any type octet this codec does not model (Notification, MD5-Challenge,
/// Expanded, Experimental, ...). Preserved verbatim; the session layer
/// decides whether to Nak or fail it.
struct UnknownBody {
    uint8_t type;
    std::vector<uint8_t> data;

    friend bool operator==(const UnknownBody&, const UnknownBody&) = default;
};

// monostate is the empty body of Success/Failure frames.
using Body = std::variant<std::monostate, IdentityBody, NakBody, MethodBody,
                          UnknownBody>;

struct Message {
    Code code;
    uint8_t identifier;
    Body body;

    friend bool operator==(const Message&, const Message&) = default;
};

enum class DecodeError : uint8_t {
    ShortFrame,            // fewer than 4 octets
    LengthMismatch,        // declared length != buffer length
    UnknownCode,           // code outside 1..4
    UnexpectedPayload,     // Success/Failure longer than the header
    MissingType,           // Request/Response without a type octet
    UnknownPhase,          // Type-84 phase octet outside {1, 2}
    SaltLengthOutOfRange,  // salt shorter than 4 octets
    EmptyInteger,          // zero-length modulus/proof/control value
    NonCanonicalInteger,   // leading zero octet
    ChallengePadding,      // verify request with nonzero upper bits
    MalformedPhase,        // phase data truncated or wrongly sized
};

const char* to_string(DecodeError error);

using DecodeResult = std::variant<Message, DecodeError>;

/// Serializes the message; the length field is always computed from the
/// actual payload. Throws std::length_error if the frame would exceed
/// 2^16 - 1 octets or a proof does not fit its one-octet length field, and
/// std::invalid_argument for bodies violating their own invariants.
std::vector<uint8_t> encode(const Message& message);

/// Total over arbitrary bytes. decode(encode(m)) == m for every valid
/// message. Never throws; allocation is bounded by the declared length.
DecodeResult decode(std::span<const uint8_t> frame);

// Convenience constructors used by the session layer.
Message make_identity_request(uint8_t identifier, std::string prompt = {});
Message make_identity_response(uint8_t identifier, std::string identity);
Message make_nak(uint8_t identifier, std::vector<uint8_t> desired_types);
Message make_setup_request(uint8_t identifier, std::vector<uint8_t> salt,
                           Nat modulus);
Message make_setup_response(uint8_t identifier, Nat control_value);
Message make_verify_request(uint8_t identifier, uint8_t bit);
Message make_verify_response(uint8_t identifier, Nat proof, Nat control_value);
Message make_success(uint8_t identifier);
Message make_failure(uint8_t identifier);

}  // namespace zkpeap::eap
