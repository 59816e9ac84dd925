#include "zkpeap/handshake.hpp"

namespace zkpeap {

using namespace std::chrono_literals;

DriveResult run_handshake(AuthenticatorSession& authenticator, PeerHooks peer,
                          const DriveOptions& options) {
    DriveResult result;
    auto engine = std::make_shared<FaultEngine>(FaultPlan{options.faults});

    auto record = [&result](Direction direction) {
        return [&result, direction](std::span<const uint8_t> frame) {
            result.transcript.push_back(
                TranscriptEntry{direction,
                                {frame.begin(), frame.end()},
                                result.transcript.size()});
        };
    };

    CarrierPair pair = make_memory_pair();
    auto auth_end = fault_wrap(
        observe_wrap(pair.first, record(Direction::AuthenticatorToPeer)),
        engine);
    auto peer_end = fault_wrap(
        observe_wrap(pair.second, record(Direction::PeerToAuthenticator)),
        engine);

    auth_end->send_frame(authenticator.start());

    result.hung = true;
    for (std::size_t step = 0; step < options.step_limit; ++step) {
        bool progress = false;

        for (;;) {
            const RecvResult incoming = peer_end->recv_frame(0ms);
            if (incoming.status != RecvStatus::Frame) {
                break;
            }
            progress = true;
            if (const auto response = peer.on_frame(incoming.frame)) {
                peer_end->send_frame(*response);
            }
        }

        for (;;) {
            const RecvResult incoming = auth_end->recv_frame(0ms);
            if (incoming.status != RecvStatus::Frame) {
                break;
            }
            progress = true;
            if (const auto outgoing = authenticator.on_frame(incoming.frame)) {
                auth_end->send_frame(*outgoing);
            }
        }

        if (progress) {
            continue;
        }
        // Quiet wire: finished, or a frame went missing and the
        // authenticator's timeout fires.
        if (authenticator.status() != AuthenticatorSession::Status::InProgress) {
            result.hung = false;
            break;
        }
        if (const auto retransmit = authenticator.on_timeout()) {
            auth_end->send_frame(*retransmit);
        } else {
            result.hung = false;  // budget exhausted; session rejected
            break;
        }
    }
    return result;
}

PeerHooks hooks_for(PeerSession& peer) {
    return PeerHooks{
        [&peer](std::span<const uint8_t> frame) { return peer.on_frame(frame); },
        [&peer] { return peer.status(); }};
}

PeerHooks hooks_for(CheatingPeerSession& peer) {
    return PeerHooks{
        [&peer](std::span<const uint8_t> frame) { return peer.on_frame(frame); },
        [&peer] { return peer.status(); }};
}

SimulationHarness::SimulationHarness(ScenarioConfig config)
    : config_(std::move(config)) {
    RandomSource enroll_rng =
        RandomSource::seeded(mix_seed(config_.seed, 0x656E726F6C6Cull));
    EnrollmentConfig enrollment;
    enrollment.kdf = config_.kdf;
    enrollment.modulus_bits = config_.modulus_bits;
    enrollment.rounds = config_.rounds;

    auto registry = std::make_shared<Registry>();
    registry->add(
        enroll(config_.identity, config_.password, enrollment, enroll_rng));
    registry_ = registry;
    credential_ = registry_->find(config_.identity);

    decoy_key_ = RandomSource::seeded(mix_seed(config_.seed, 0x6465636F79ull))
                     .bytes(32);
}

HandshakeReport SimulationHarness::run_trial(uint64_t trial) const {
    RandomSource auth_rng =
        RandomSource::seeded(mix_seed(config_.seed, 2 * trial));
    RandomSource peer_rng =
        RandomSource::seeded(mix_seed(config_.seed, 2 * trial + 1));

    AuthenticatorSession::Config auth_config;
    auth_config.registry = registry_;
    auth_config.default_rounds = config_.rounds;
    auth_config.decoy_modulus_bits = config_.modulus_bits;
    auth_config.decoy_key = decoy_key_;
    AuthenticatorSession authenticator(auth_config, auth_rng);

    DriveOptions options;
    options.faults = config_.faults;
    options.step_limit =
        64 + 16 * (static_cast<std::size_t>(config_.rounds) + 2) * 8;

    HandshakeReport report;

    if (config_.kind == ScenarioConfig::Kind::Cheater) {
        CheatingPeerSession peer(
            CheatingPeerSession::Config{config_.identity,
                                        credential_->instance(),
                                        std::max(64u, config_.rounds + 0u)},
            peer_rng);
        DriveResult drive =
            run_handshake(authenticator, hooks_for(peer), options);
        report.transcript = std::move(drive.transcript);
        report.hung = drive.hung;
        report.peer = peer.status();
    } else {
        PeerSession::Config peer_config;
        peer_config.identity = config_.identity;
        peer_config.password = config_.kind == ScenarioConfig::Kind::WrongPassword
                                   ? config_.password + "-wrong"
                                   : config_.password;
        peer_config.kdf = config_.kdf;
        peer_config.min_modulus_bits = config_.modulus_bits;
        peer_config.max_rounds = std::max(64u, config_.rounds + 0u);
        peer_config.record_audit = true;
        PeerSession peer(peer_config, peer_rng);
        DriveResult drive =
            run_handshake(authenticator, hooks_for(peer), options);
        report.transcript = std::move(drive.transcript);
        report.hung = drive.hung;
        report.peer = peer.status();
        report.witness = peer.audit_witness();
        report.nonces = peer.audit_nonces();
        report.peer_challenges = peer.audit_challenges();
    }

    report.authenticator = authenticator.status();
    report.rounds_completed = authenticator.rounds_completed();
    report.challenge_bits = authenticator.challenge_bits();
    return report;
}

}  // namespace zkpeap
