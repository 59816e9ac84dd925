#pragma once

#include "zkpeap/session.hpp"
#include "zkpeap/transport.hpp"

#include <functional>

namespace zkpeap {

/// Peer-side callbacks so the driver can run honest and cheating peers
/// through the same loop.
struct PeerHooks {
    std::function<std::optional<std::vector<uint8_t>>(std::span<const uint8_t>)>
        on_frame;
    std::function<PeerSession::Status()> status;
};

struct DriveOptions {
    FaultPlan faults;
    // Upper bound on driver iterations; generous for any sane m. A run
    // that exhausts it is reported as hung, which no test tolerates.
    std::size_t step_limit = 4096;
};

struct DriveResult {
    Transcript transcript;  // frames as delivered, after fault injection
    bool hung = false;
};

/// Drives one authentication conversation over an in-memory carrier pair
/// with virtual time: whenever the wire goes quiet and the authenticator is
/// still working, its timeout fires. Deterministic for seeded sessions.
DriveResult run_handshake(AuthenticatorSession& authenticator, PeerHooks peer,
                          const DriveOptions& options = {});

PeerHooks hooks_for(PeerSession& peer);
PeerHooks hooks_for(CheatingPeerSession& peer);

/// Canned simulation scenarios used by the simulator CLI and the
/// acceptance suite.
struct ScenarioConfig {
    enum class Kind : uint8_t { Honest, WrongPassword, Cheater };

    Kind kind = Kind::Honest;
    uint16_t rounds = 20;  // m
    unsigned modulus_bits = 512;
    uint64_t seed = 0;
    KdfConfig kdf = KdfConfig::iterated_hash(128);
    std::string identity = "sim-user";
    std::string password = "sim-password";
    FaultPlan faults;
};

struct HandshakeReport {
    AuthenticatorSession::Status authenticator;
    PeerSession::Status peer;
    Transcript transcript;
    unsigned rounds_completed = 0;
    std::vector<uint8_t> challenge_bits;
    bool hung = false;

    // Peer-side audit (honest scenarios only): the witness, every nonce in
    // draw order, and the challenge bits as the peer saw them.
    std::optional<Nat> witness;
    std::vector<Nat> nonces;
    std::vector<uint8_t> peer_challenges;
};

/// Enrolls one credential up front, then runs independent seeded trials
/// against it.
class SimulationHarness {
public:
    explicit SimulationHarness(ScenarioConfig config);

    HandshakeReport run_trial(uint64_t trial) const;

    const CredentialRecord& credential() const { return *credential_; }

private:
    ScenarioConfig config_;
    std::shared_ptr<const Registry> registry_;
    const CredentialRecord* credential_;  // owned by registry_
    std::vector<uint8_t> decoy_key_;
};

}  // namespace zkpeap
