#include "zkpeap/handshake.hpp"

#include <benchmark/benchmark.h>

namespace zkpeap {
namespace {

void BM_EncodeVerifyResponse(benchmark::State& state) {
    RandomSource rng = RandomSource::seeded(5);
    const Nat proof = rng.below(Nat(1) << 512);
    const Nat control = rng.below(Nat(1) << 512);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            eap::encode(eap::make_verify_response(7, proof, control)));
    }
}
BENCHMARK(BM_EncodeVerifyResponse);

void BM_DecodeVerifyResponse(benchmark::State& state) {
    RandomSource rng = RandomSource::seeded(6);
    const auto frame = eap::encode(eap::make_verify_response(
        7, rng.below(Nat(1) << 512), rng.below(Nat(1) << 512)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eap::decode(frame));
    }
}
BENCHMARK(BM_DecodeVerifyResponse);

void BM_VerifyRound(benchmark::State& state) {
    RandomSource rng = RandomSource::seeded(7);
    const SemiprimeParts parts = gen_semiprime(512, rng);
    const Nat w = sample_coprime(parts.n, rng);
    const PublicInstance instance = make_instance(parts.n, mod_sq(w, parts.n));
    const Witness witness{w};
    const RoundCommit round = commit(instance, rng);
    const Challenge challenge{1};
    const RoundProof proof = respond(witness, round, challenge, instance.n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            verify_round(instance, round.y, challenge, proof));
    }
}
BENCHMARK(BM_VerifyRound);

void BM_Stretch(benchmark::State& state) {
    RandomSource rng = RandomSource::seeded(8);
    const SemiprimeParts parts = gen_semiprime(512, rng);
    const Salt salt = Salt::random(16, rng);
    const KdfConfig kdf = KdfConfig::iterated_hash(10'000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stretch("benchmark-password", salt, kdf,
                                         parts.n));
    }
}
BENCHMARK(BM_Stretch);

void BM_HonestHandshake(benchmark::State& state) {
    ScenarioConfig scenario;
    scenario.kind = ScenarioConfig::Kind::Honest;
    scenario.rounds = static_cast<uint16_t>(state.range(0));
    scenario.modulus_bits = 512;
    scenario.seed = 0xB34C;
    scenario.kdf = KdfConfig::iterated_hash(16);
    const SimulationHarness harness(scenario);
    uint64_t trial = 0;
    for (auto _ : state) {
        const HandshakeReport report = harness.run_trial(trial++);
        if (report.authenticator != AuthenticatorSession::Status::Accepted) {
            state.SkipWithError("honest handshake rejected");
            break;
        }
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            scenario.rounds);
}
BENCHMARK(BM_HonestHandshake)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zkpeap
