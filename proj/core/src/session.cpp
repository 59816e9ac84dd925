#include "zkpeap/session.hpp"

#include <openssl/crypto.h>

namespace zkpeap {
namespace {

bool unit_in_range(const Nat& value, const Modulus& n) {
    return value >= 1 && value < n.value() && gcd(value, n.value()) == 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// PeerSession

PeerSession::PeerSession(Config config, RandomSource rng)
    : config_(std::move(config)), rng_(rng) {}

void PeerSession::erase_password() {
    if (!config_.password.empty()) {
        OPENSSL_cleanse(config_.password.data(), config_.password.size());
        config_.password.clear();
        config_.password.shrink_to_fit();
    }
}

std::optional<std::vector<uint8_t>> PeerSession::on_frame(
    std::span<const uint8_t> frame) {
    const eap::DecodeResult decoded = eap::decode(frame);
    if (std::holds_alternative<eap::DecodeError>(decoded)) {
        protocol_error_noted_ = true;
        return std::nullopt;
    }
    const auto& message = std::get<eap::Message>(decoded);

    switch (message.code) {
        case eap::Code::Success:
            if (status_ == Status::InProgress) {
                status_ = Status::Accepted;
            }
            return std::nullopt;
        case eap::Code::Failure:
            if (status_ == Status::InProgress) {
                status_ = Status::Rejected;
            }
            return std::nullopt;
        case eap::Code::Response:
            return std::nullopt;  // peers only consume requests
        case eap::Code::Request:
            break;
    }

    if (status_ != Status::InProgress) {
        return std::nullopt;
    }

    // A retransmitted request is answered with the exact bytes sent before;
    // no fresh nonces are drawn for it.
    if (last_request_id_ && message.identifier == *last_request_id_) {
        return last_response_;
    }

    pending_id_ = message.identifier;
    const std::optional<eap::Message> reply = handle_request(message);
    if (!reply) {
        return std::nullopt;
    }
    std::vector<uint8_t> bytes = eap::encode(*reply);
    last_request_id_ = message.identifier;
    last_response_ = bytes;
    return bytes;
}

std::optional<eap::Message> PeerSession::handle_request(
    const eap::Message& message) {
    if (std::holds_alternative<eap::IdentityBody>(message.body)) {
        return eap::make_identity_response(pending_id_, config_.identity);
    }
    if (const auto* method = std::get_if<eap::MethodBody>(&message.body)) {
        if (const auto* setup = std::get_if<eap::SetupRequest>(&method->phase)) {
            return handle_setup(*setup);
        }
        if (const auto* verify =
                std::get_if<eap::VerifyRequest>(&method->phase)) {
            return handle_verify(*verify);
        }
        return std::nullopt;  // response-shaped payload inside a request
    }
    if (std::holds_alternative<eap::UnknownBody>(message.body)) {
        // Some other method was requested; name the one we speak.
        return eap::make_nak(pending_id_, {eap::kMethodType});
    }
    return std::nullopt;  // Nak is not a request
}

std::optional<eap::Message> PeerSession::handle_setup(
    const eap::SetupRequest& setup) {
    if (witness_) {
        return std::nullopt;  // parameters were already fixed for this run
    }
    if (bit_length(setup.modulus) < config_.min_modulus_bits) {
        status_ = Status::ProtocolError;
        return std::nullopt;
    }
    std::optional<Modulus> modulus;
    try {
        modulus.emplace(setup.modulus);
    } catch (const std::invalid_argument&) {
        status_ = Status::ProtocolError;
        return std::nullopt;
    }

    const Salt salt = Salt::from_bytes(setup.salt);
    witness_ = stretch(config_.password, salt, config_.kdf, *modulus);
    erase_password();
    modulus_ = std::move(modulus);

    Nat u = sample_coprime(*modulus_, rng_);
    Nat y = mod_sq(u, *modulus_);
    if (config_.record_audit) {
        audit_witness_ = witness_->w;
        audit_nonces_.push_back(u);
    }
    nonce_ = std::move(u);
    return eap::make_setup_response(pending_id_, std::move(y));
}

std::optional<eap::Message> PeerSession::handle_verify(
    const eap::VerifyRequest& verify) {
    if (!witness_ || !nonce_ || !modulus_) {
        return std::nullopt;  // verification before setup
    }
    if (rounds_answered_ >= config_.max_rounds) {
        status_ = Status::ProtocolError;
        return std::nullopt;
    }

    const RoundCommit current{*nonce_, Nat{}};
    RoundProof proof =
        respond(*witness_, current, Challenge{verify.bit}, *modulus_);

    Nat u_next = sample_coprime(*modulus_, rng_);
    Nat y_next = mod_sq(u_next, *modulus_);
    if (config_.record_audit) {
        audit_nonces_.push_back(u_next);
        audit_challenges_.push_back(verify.bit);
    }
    nonce_ = std::move(u_next);
    ++rounds_answered_;
    return eap::make_verify_response(pending_id_, std::move(proof.z),
                                     std::move(y_next));
}

// ---------------------------------------------------------------------------
// AuthenticatorSession

AuthenticatorSession::AuthenticatorSession(Config config, RandomSource rng)
    : config_(std::move(config)),
      rng_(rng),
      identifier_(0),
      retransmits_left_(config_.retransmit_budget) {
    if (config_.decoy_key.empty()) {
        config_.decoy_key = rng_.bytes(32);
    }
}

std::vector<uint8_t> AuthenticatorSession::start() {
    identifier_ = static_cast<uint8_t>(rng_.next_u64() & 0xFF);
    state_ = State::AwaitIdentity;
    return send_request(eap::make_identity_request(identifier_));
}

std::vector<uint8_t> AuthenticatorSession::send_request(
    const eap::Message& message) {
    outstanding_request_ = eap::encode(message);
    retransmits_left_ = config_.retransmit_budget;
    return outstanding_request_;
}

std::vector<uint8_t> AuthenticatorSession::fail() {
    status_ = Status::Rejected;
    state_ = State::Done;
    return eap::encode(eap::make_failure(identifier_));
}

std::vector<uint8_t> AuthenticatorSession::conclude_success() {
    status_ = Status::Accepted;
    state_ = State::Done;
    return eap::encode(eap::make_success(identifier_));
}

std::optional<std::vector<uint8_t>> AuthenticatorSession::on_frame(
    std::span<const uint8_t> frame) {
    if (state_ == State::Done) {
        return std::nullopt;
    }
    const eap::DecodeResult decoded = eap::decode(frame);
    if (std::holds_alternative<eap::DecodeError>(decoded)) {
        return fail();
    }
    const auto& message = std::get<eap::Message>(decoded);
    if (message.code != eap::Code::Response) {
        return std::nullopt;
    }
    if (message.identifier != identifier_) {
        return std::nullopt;  // stale or spoofed; keep waiting
    }
    if (std::holds_alternative<eap::NakBody>(message.body)) {
        return fail();  // no alternative methods on offer
    }

    switch (state_) {
        case State::AwaitIdentity:
            return handle_identity(message);
        case State::AwaitSetupResponse:
            return handle_setup_response(message);
        case State::AwaitVerifyResponse:
            return handle_verify_response(message);
        case State::Done:
            break;
    }
    return std::nullopt;
}

std::optional<std::vector<uint8_t>> AuthenticatorSession::on_timeout() {
    if (state_ == State::Done) {
        return std::nullopt;
    }
    if (retransmits_left_ == 0) {
        status_ = Status::Rejected;
        state_ = State::Done;
        return std::nullopt;
    }
    --retransmits_left_;
    return outstanding_request_;
}

std::optional<std::vector<uint8_t>> AuthenticatorSession::handle_identity(
    const eap::Message& message) {
    const auto* body = std::get_if<eap::IdentityBody>(&message.body);
    if (body == nullptr) {
        return fail();
    }
    identity_ = body->payload;

    const CredentialRecord* found =
        config_.registry ? config_.registry->find(identity_) : nullptr;
    try {
        credential_ = found != nullptr ? *found : decoy_credential(identity_);
        instance_ = credential_->instance();
    } catch (const std::exception&) {
        return fail();
    }

    identifier_ = static_cast<uint8_t>(identifier_ + 1);
    state_ = State::AwaitSetupResponse;
    const auto salt = credential_->salt.bytes();
    return send_request(eap::make_setup_request(
        identifier_, {salt.begin(), salt.end()}, credential_->n.value()));
}

std::vector<uint8_t> AuthenticatorSession::next_verify_request(
    Nat control_value) {
    pending_control_ = std::move(control_value);
    pending_bit_ = rng_.next_bit();
    bits_.push_back(pending_bit_);
    ++round_;
    identifier_ = static_cast<uint8_t>(identifier_ + 1);
    state_ = State::AwaitVerifyResponse;
    return send_request(eap::make_verify_request(identifier_, pending_bit_));
}

std::optional<std::vector<uint8_t>> AuthenticatorSession::handle_setup_response(
    const eap::Message& message) {
    const auto* method = std::get_if<eap::MethodBody>(&message.body);
    if (method == nullptr) {
        return fail();
    }
    const auto* setup = std::get_if<eap::SetupResponse>(&method->phase);
    if (setup == nullptr) {
        return fail();
    }
    // Rejecting non-unit control values closes the z = y = 0 family of
    // forgeries, mirroring verify_round.
    if (!unit_in_range(setup->control_value, credential_->n)) {
        return fail();
    }
    return next_verify_request(setup->control_value);
}

std::optional<std::vector<uint8_t>>
AuthenticatorSession::handle_verify_response(const eap::Message& message) {
    const auto* method = std::get_if<eap::MethodBody>(&message.body);
    if (method == nullptr) {
        return fail();
    }
    const auto* verify = std::get_if<eap::VerifyResponse>(&method->phase);
    if (verify == nullptr) {
        return fail();
    }
    if (!verify_round(*instance_, pending_control_, Challenge{pending_bit_},
                      RoundProof{verify->proof})) {
        return fail();
    }
    ++rounds_completed_;
    if (round_ >= credential_->rounds) {
        return conclude_success();  // the spare y_{m+1} is discarded
    }
    if (!unit_in_range(verify->control_value, credential_->n)) {
        return fail();
    }
    return next_verify_request(verify->control_value);
}

CredentialRecord AuthenticatorSession::decoy_credential(
    const std::string& identity) const {
    // Unknown identities get a stable fake credential instead of an early
    // Failure, so probing the registry looks exactly like mistyping a
    // password.
    std::vector<uint8_t> input = config_.decoy_key;
    input.push_back(0x00);
    input.insert(input.end(), identity.begin(), identity.end());
    const std::vector<uint8_t> digest = sha256(input);

    uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) {
        seed = (seed << 8) | digest[i];
    }
    RandomSource decoy_rng = RandomSource::seeded(seed);

    Salt salt = Salt::random(16, decoy_rng);
    SemiprimeParts semiprime =
        gen_semiprime(config_.decoy_modulus_bits, decoy_rng);
    const Nat root = sample_coprime(semiprime.n, decoy_rng);
    Nat x = mod_sq(root, semiprime.n);
    return CredentialRecord{identity,
                            std::move(salt),
                            std::move(x),
                            std::move(semiprime.n),
                            KdfConfig::scrypt_default(),
                            config_.default_rounds};
}

// ---------------------------------------------------------------------------
// CheatingPeerSession

CheatingPeerSession::CheatingPeerSession(Config config, RandomSource rng)
    : config_(std::move(config)), rng_(rng) {}

std::optional<std::vector<uint8_t>> CheatingPeerSession::on_frame(
    std::span<const uint8_t> frame) {
    const eap::DecodeResult decoded = eap::decode(frame);
    if (std::holds_alternative<eap::DecodeError>(decoded)) {
        return std::nullopt;
    }
    const auto& message = std::get<eap::Message>(decoded);

    switch (message.code) {
        case eap::Code::Success:
            if (status_ == Status::InProgress) {
                status_ = Status::Accepted;
            }
            return std::nullopt;
        case eap::Code::Failure:
            if (status_ == Status::InProgress) {
                status_ = Status::Rejected;
            }
            return std::nullopt;
        case eap::Code::Response:
            return std::nullopt;
        case eap::Code::Request:
            break;
    }
    if (status_ != Status::InProgress) {
        return std::nullopt;
    }
    if (last_request_id_ && message.identifier == *last_request_id_) {
        return last_response_;
    }

    std::optional<eap::Message> reply;
    if (std::holds_alternative<eap::IdentityBody>(message.body)) {
        reply = eap::make_identity_response(message.identifier,
                                            config_.identity);
    } else if (const auto* method =
                   std::get_if<eap::MethodBody>(&message.body)) {
        if (std::holds_alternative<eap::SetupRequest>(method->phase)) {
            current_ = cheat_round(config_.instance, rng_.next_bit(), rng_);
            reply = eap::make_setup_response(message.identifier, current_->y);
        } else if (std::holds_alternative<eap::VerifyRequest>(method->phase)) {
            if (!current_ || rounds_answered_ >= config_.max_rounds) {
                return std::nullopt;
            }
            RoundProof proof = cheat_answer(*current_);
            current_ = cheat_round(config_.instance, rng_.next_bit(), rng_);
            reply = eap::make_verify_response(
                message.identifier, std::move(proof.z), current_->y);
            ++rounds_answered_;
        }
    } else if (std::holds_alternative<eap::UnknownBody>(message.body)) {
        reply = eap::make_nak(message.identifier, {eap::kMethodType});
    }

    if (!reply) {
        return std::nullopt;
    }
    std::vector<uint8_t> bytes = eap::encode(*reply);
    last_request_id_ = message.identifier;
    last_response_ = bytes;
    return bytes;
}

}  // namespace zkpeap
