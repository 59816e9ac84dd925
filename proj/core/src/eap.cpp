#include "zkpeap/eap.hpp"

#include <stdexcept>

namespace zkpeap::eap {
namespace {

void append_nat(std::vector<uint8_t>& out, const Nat& value) {
    const std::vector<uint8_t> bytes = nat_to_bytes(value);
    out.insert(out.end(), bytes.begin(), bytes.end());
}

std::vector<uint8_t> encode_body(const Message& message) {
    std::vector<uint8_t> out;

    if (std::holds_alternative<std::monostate>(message.body)) {
        return out;
    }

    if (const auto* identity = std::get_if<IdentityBody>(&message.body)) {
        out.push_back(static_cast<uint8_t>(Type::Identity));
        out.insert(out.end(), identity->payload.begin(),
                   identity->payload.end());
        return out;
    }

    if (const auto* nak = std::get_if<NakBody>(&message.body)) {
        out.push_back(static_cast<uint8_t>(Type::Nak));
        out.insert(out.end(), nak->desired_types.begin(),
                   nak->desired_types.end());
        return out;
    }

    if (const auto* unknown = std::get_if<UnknownBody>(&message.body)) {
        out.push_back(unknown->type);
        out.insert(out.end(), unknown->data.begin(), unknown->data.end());
        return out;
    }

    const auto& method = std::get<MethodBody>(message.body);
    out.push_back(kMethodType);

    if (const auto* setup = std::get_if<SetupRequest>(&method.phase)) {
        if (setup->salt.size() < 4 || setup->salt.size() > 255) {
            throw std::invalid_argument("setup request: bad salt length");
        }
        out.push_back(0x01);
        out.push_back(static_cast<uint8_t>(setup->salt.size()));
        out.insert(out.end(), setup->salt.begin(), setup->salt.end());
        append_nat(out, setup->modulus);
        return out;
    }
    if (const auto* setup = std::get_if<SetupResponse>(&method.phase)) {
        out.push_back(0x01);
        append_nat(out, setup->control_value);
        return out;
    }
    if (const auto* verify = std::get_if<VerifyRequest>(&method.phase)) {
        if (verify->bit > 1) {
            throw std::invalid_argument("verify request: bit must be 0 or 1");
        }
        out.push_back(0x02);
        out.push_back(verify->bit);
        return out;
    }
    const auto& verify = std::get<VerifyResponse>(method.phase);
    const std::vector<uint8_t> proof = nat_to_bytes(verify.proof);
    if (proof.size() > 255) {
        throw std::length_error("verify response: proof exceeds 255 octets");
    }
    out.push_back(0x02);
    out.push_back(static_cast<uint8_t>(proof.size()));
    out.insert(out.end(), proof.begin(), proof.end());
    append_nat(out, verify.control_value);
    return out;
}

// A multi-octet integer field must not carry a leading zero octet; a single
// zero octet is the canonical encoding of 0.
bool canonical(std::span<const uint8_t> bytes) {
    return bytes.size() <= 1 || bytes[0] != 0;
}

DecodeResult decode_method(Code code, uint8_t identifier,
                           std::span<const uint8_t> data) {
    if (data.empty()) {
        return DecodeError::MalformedPhase;
    }
    const uint8_t phase = data[0];
    data = data.subspan(1);

    if (phase != 0x01 && phase != 0x02) {
        return DecodeError::UnknownPhase;
    }

    if (phase == 0x01 && code == Code::Request) {
        if (data.empty()) {
            return DecodeError::MalformedPhase;
        }
        const uint8_t salt_len = data[0];
        data = data.subspan(1);
        if (salt_len < 4) {
            return DecodeError::SaltLengthOutOfRange;
        }
        if (data.size() < salt_len) {
            return DecodeError::MalformedPhase;
        }
        std::vector<uint8_t> salt(data.begin(), data.begin() + salt_len);
        const auto modulus = data.subspan(salt_len);
        if (modulus.empty()) {
            return DecodeError::EmptyInteger;
        }
        if (!canonical(modulus)) {
            return DecodeError::NonCanonicalInteger;
        }
        return Message{code, identifier,
                       MethodBody{SetupRequest{std::move(salt),
                                               nat_from_bytes(modulus)}}};
    }

    if (phase == 0x01) {  // Code::Response
        if (data.empty()) {
            return DecodeError::EmptyInteger;
        }
        if (!canonical(data)) {
            return DecodeError::NonCanonicalInteger;
        }
        return Message{code, identifier,
                       MethodBody{SetupResponse{nat_from_bytes(data)}}};
    }

    if (code == Code::Request) {  // phase == 0x02
        if (data.size() != 1) {
            return DecodeError::MalformedPhase;
        }
        if ((data[0] & 0xFE) != 0) {
            return DecodeError::ChallengePadding;
        }
        return Message{code, identifier, MethodBody{VerifyRequest{data[0]}}};
    }

    // Verification response.
    if (data.empty()) {
        return DecodeError::MalformedPhase;
    }
    const uint8_t proof_len = data[0];
    data = data.subspan(1);
    if (proof_len == 0) {
        return DecodeError::EmptyInteger;
    }
    if (data.size() < proof_len) {
        return DecodeError::MalformedPhase;
    }
    const auto proof = data.subspan(0, proof_len);
    const auto control = data.subspan(proof_len);
    if (control.empty()) {
        return DecodeError::EmptyInteger;
    }
    if (!canonical(proof) || !canonical(control)) {
        return DecodeError::NonCanonicalInteger;
    }
    return Message{code, identifier,
                   MethodBody{VerifyResponse{nat_from_bytes(proof),
                                             nat_from_bytes(control)}}};
}

}  // namespace

const char* to_string(DecodeError error) {
    switch (error) {
        case DecodeError::ShortFrame: return "short frame";
        case DecodeError::LengthMismatch: return "length field mismatch";
        case DecodeError::UnknownCode: return "unknown code";
        case DecodeError::UnexpectedPayload: return "unexpected payload";
        case DecodeError::MissingType: return "missing type octet";
        case DecodeError::UnknownPhase: return "unknown phase type";
        case DecodeError::SaltLengthOutOfRange: return "salt length out of range";
        case DecodeError::EmptyInteger: return "empty integer field";
        case DecodeError::NonCanonicalInteger: return "non-canonical integer";
        case DecodeError::ChallengePadding: return "nonzero challenge padding";
        case DecodeError::MalformedPhase: return "malformed phase data";
    }
    return "unknown error";
}

std::vector<uint8_t> encode(const Message& message) {
    const std::vector<uint8_t> body = encode_body(message);
    const std::size_t total = kHeaderSize + body.size();
    if (total > kMaxFrameSize) {
        throw std::length_error("EAP frame exceeds 65535 octets");
    }
    std::vector<uint8_t> out;
    out.reserve(total);
    out.push_back(static_cast<uint8_t>(message.code));
    out.push_back(message.identifier);
    out.push_back(static_cast<uint8_t>(total >> 8));
    out.push_back(static_cast<uint8_t>(total & 0xFF));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

DecodeResult decode(std::span<const uint8_t> frame) {
    if (frame.size() < kHeaderSize) {
        return DecodeError::ShortFrame;
    }
    const uint8_t code_octet = frame[0];
    const uint8_t identifier = frame[1];
    const std::size_t declared =
        (static_cast<std::size_t>(frame[2]) << 8) | frame[3];
    if (declared != frame.size()) {
        return DecodeError::LengthMismatch;
    }
    if (code_octet < 1 || code_octet > 4) {
        return DecodeError::UnknownCode;
    }
    const Code code = static_cast<Code>(code_octet);

    if (code == Code::Success || code == Code::Failure) {
        if (frame.size() != kHeaderSize) {
            return DecodeError::UnexpectedPayload;
        }
        return Message{code, identifier, std::monostate{}};
    }

    if (frame.size() < kHeaderSize + 1) {
        return DecodeError::MissingType;
    }
    const uint8_t type = frame[kHeaderSize];
    const auto data = frame.subspan(kHeaderSize + 1);

    switch (type) {
        case static_cast<uint8_t>(Type::Identity):
            return Message{code, identifier,
                           IdentityBody{std::string(data.begin(), data.end())}};
        case static_cast<uint8_t>(Type::Nak):
            return Message{
                code, identifier,
                NakBody{std::vector<uint8_t>(data.begin(), data.end())}};
        case kMethodType:
            return decode_method(code, identifier, data);
        default:
            return Message{
                code, identifier,
                UnknownBody{type,
                            std::vector<uint8_t>(data.begin(), data.end())}};
    }
}

Message make_identity_request(uint8_t identifier, std::string prompt) {
    return Message{Code::Request, identifier, IdentityBody{std::move(prompt)}};
}

Message make_identity_response(uint8_t identifier, std::string identity) {
    return Message{Code::Response, identifier,
                   IdentityBody{std::move(identity)}};
}

Message make_nak(uint8_t identifier, std::vector<uint8_t> desired_types) {
    return Message{Code::Response, identifier,
                   NakBody{std::move(desired_types)}};
}

Message make_setup_request(uint8_t identifier, std::vector<uint8_t> salt,
                           Nat modulus) {
    return Message{
        Code::Request, identifier,
        MethodBody{SetupRequest{std::move(salt), std::move(modulus)}}};
}

Message make_setup_response(uint8_t identifier, Nat control_value) {
    return Message{Code::Response, identifier,
                   MethodBody{SetupResponse{std::move(control_value)}}};
}

Message make_verify_request(uint8_t identifier, uint8_t bit) {
    return Message{Code::Request, identifier, MethodBody{VerifyRequest{bit}}};
}

Message make_verify_response(uint8_t identifier, Nat proof,
                             Nat control_value) {
    return Message{Code::Response, identifier,
                   MethodBody{VerifyResponse{std::move(proof),
                                             std::move(control_value)}}};
}

Message make_success(uint8_t identifier) {
    return Message{Code::Success, identifier, std::monostate{}};
}

Message make_failure(uint8_t identifier) {
    return Message{Code::Failure, identifier, std::monostate{}};
}

}  // namespace zkpeap::eap
