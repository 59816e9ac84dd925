#pragma once

#include "zkpeap/credential.hpp"
#include "zkpeap/eap.hpp"

#include <memory>
#include <optional>

namespace zkpeap {

enum class Direction : uint8_t { AuthenticatorToPeer, PeerToAuthenticator };

struct TranscriptEntry {
    Direction direction;
    std::vector<uint8_t> frame;
    uint64_t at;  // virtual step in simulation, milliseconds over TCP
};
using Transcript = std::vector<TranscriptEntry>;

/*
 * Both state machines are lock-step: the authenticator owns the
 * conversation and issues requests, the peer only ever answers the request
 * in front of it. Each new request gets a fresh identifier (previous + 1
 * mod 256, starting at a random octet); a retransmission reuses both the
 * identifier and the exact bytes. Responses whose identifier does not match
 * the outstanding request are dropped without any state change.
 */

/// Peer (prover) session: answers identity, derives the root from the
/// password on setup, then answers challenge rounds until the
/// authenticator concludes.
class PeerSession {
public:
    struct Config {
        std::string identity;
        std::string password;
        KdfConfig kdf = KdfConfig::scrypt_default();
        // Floor on an acceptable modulus; production profile is 512.
        unsigned min_modulus_bits = 512;
        // Refuse to run forever for a malicious authenticator.
        unsigned max_rounds = 64;
        // Retain nonce/witness copies for harness assertions.
        bool record_audit = false;
    };

    enum class Status : uint8_t { InProgress, Accepted, Rejected, ProtocolError };

    PeerSession(Config config, RandomSource rng);

    /// Handles one received frame; returns the response frame to send, if
    /// any. Frames that don't decode, don't fit the current state, or
    /// violate the method's parameter bounds produce no response (the
    /// authenticator's retransmit/timeout discipline deals with silence).
    std::optional<std::vector<uint8_t>> on_frame(std::span<const uint8_t> frame);

    Status status() const { return status_; }
    unsigned rounds_answered() const { return rounds_answered_; }

    // Populated only when config.record_audit is set.
    const std::optional<Nat>& audit_witness() const { return audit_witness_; }
    const std::vector<Nat>& audit_nonces() const { return audit_nonces_; }
    const std::vector<uint8_t>& audit_challenges() const {
        return audit_challenges_;
    }

private:
    std::optional<eap::Message> handle_request(const eap::Message& message);
    std::optional<eap::Message> handle_setup(const eap::SetupRequest& setup);
    std::optional<eap::Message> handle_verify(const eap::VerifyRequest& verify);
    void erase_password();

    Config config_;
    RandomSource rng_;
    Status status_ = Status::InProgress;
    bool protocol_error_noted_ = false;

    std::optional<Modulus> modulus_;
    std::optional<Witness> witness_;
    std::optional<Nat> nonce_;  // u for the control value most recently sent
    unsigned rounds_answered_ = 0;

    std::optional<uint8_t> last_request_id_;
    std::vector<uint8_t> last_response_;
    uint8_t pending_id_ = 0;

    std::optional<Nat> audit_witness_;
    std::vector<Nat> audit_nonces_;
    std::vector<uint8_t> audit_challenges_;
};

/// Authenticator (verifier) session: drives identification, setup and m
/// verification rounds against one peer, retransmitting unanswered
/// requests up to a budget.
class AuthenticatorSession {
public:
    struct Config {
        std::shared_ptr<const Registry> registry;
        // Round count and modulus size for decoy credentials handed to
        // unknown identities; match your enrollment profile.
        uint16_t default_rounds = 20;
        unsigned decoy_modulus_bits = 512;
        unsigned retransmit_budget = 3;
        // Keyed-hash secret for deterministic decoys. Random when empty.
        std::vector<uint8_t> decoy_key;
    };

    enum class Status : uint8_t { InProgress, Accepted, Rejected };

    AuthenticatorSession(Config config, RandomSource rng);

    /// Opens the conversation with an identity request.
    std::vector<uint8_t> start();

    /// Handles one received frame. May return a follow-up request, a
    /// Success frame (status becomes Accepted) or a Failure frame (status
    /// becomes Rejected); no return means the frame was dropped.
    std::optional<std::vector<uint8_t>> on_frame(std::span<const uint8_t> frame);

    /// Retransmits the outstanding request while budget remains; exhausting
    /// the budget rejects the session without a frame.
    std::optional<std::vector<uint8_t>> on_timeout();

    Status status() const { return status_; }
    unsigned rounds_completed() const { return rounds_completed_; }
    const std::string& peer_identity() const { return identity_; }
    const std::vector<uint8_t>& challenge_bits() const { return bits_; }

private:
    enum class State : uint8_t {
        AwaitIdentity,
        AwaitSetupResponse,
        AwaitVerifyResponse,
        Done,
    };

    std::vector<uint8_t> send_request(const eap::Message& message);
    std::vector<uint8_t> fail();
    std::vector<uint8_t> conclude_success();
    std::optional<std::vector<uint8_t>> handle_identity(const eap::Message&);
    std::optional<std::vector<uint8_t>> handle_setup_response(const eap::Message&);
    std::optional<std::vector<uint8_t>> handle_verify_response(const eap::Message&);
    CredentialRecord decoy_credential(const std::string& identity) const;
    std::vector<uint8_t> next_verify_request(Nat control_value);
    bool acceptable_unit(const Nat& value) const;

    Config config_;
    RandomSource rng_;
    State state_ = State::AwaitIdentity;
    Status status_ = Status::InProgress;

    uint8_t identifier_;
    std::vector<uint8_t> outstanding_request_;
    unsigned retransmits_left_;

    std::string identity_;
    std::optional<CredentialRecord> credential_;
    std::optional<PublicInstance> instance_;
    Nat pending_control_;
    uint8_t pending_bit_ = 0;
    unsigned round_ = 0;  // 1-based current verification round
    unsigned rounds_completed_ = 0;
    std::vector<uint8_t> bits_;
};

/// Dishonest prover for soundness measurements: runs the protocol without a
/// password, guessing each challenge bit in advance. Needs the public
/// instance (n, x) that the authenticator will verify against, which models
/// an attacker who obtained the residue but not the root.
class CheatingPeerSession {
public:
    struct Config {
        std::string identity;
        PublicInstance instance;
        unsigned max_rounds = 64;
    };

    using Status = PeerSession::Status;

    CheatingPeerSession(Config config, RandomSource rng);

    std::optional<std::vector<uint8_t>> on_frame(std::span<const uint8_t> frame);

    Status status() const { return status_; }

private:
    Config config_;
    RandomSource rng_;
    Status status_ = Status::InProgress;

    std::optional<CheatRound> current_;
    unsigned rounds_answered_ = 0;

    std::optional<uint8_t> last_request_id_;
    std::vector<uint8_t> last_response_;
};

}  // namespace zkpeap
