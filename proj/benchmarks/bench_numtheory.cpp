#include "zkpeap/numtheory.hpp"

#include <benchmark/benchmark.h>

namespace zkpeap {
namespace {

SemiprimeParts fixture_semiprime(unsigned bits) {
    RandomSource rng = RandomSource::seeded(0xBE9C + bits);
    return gen_semiprime(bits, rng);
}

void BM_ModPow(benchmark::State& state) {
    const unsigned bits = static_cast<unsigned>(state.range(0));
    const SemiprimeParts parts = fixture_semiprime(bits);
    RandomSource rng = RandomSource::seeded(1);
    const Nat base = sample_coprime(parts.n, rng);
    const Nat exponent = rng.below(parts.n.value());
    for (auto _ : state) {
        benchmark::DoNotOptimize(mod_pow(base, exponent, parts.n));
    }
}
BENCHMARK(BM_ModPow)->Arg(512)->Arg(1024);

void BM_Jacobi(benchmark::State& state) {
    const unsigned bits = static_cast<unsigned>(state.range(0));
    const SemiprimeParts parts = fixture_semiprime(bits);
    RandomSource rng = RandomSource::seeded(2);
    const Nat x = sample_coprime(parts.n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobi(x, parts.n));
    }
}
BENCHMARK(BM_Jacobi)->Arg(512)->Arg(1024);

void BM_SampleCoprime(benchmark::State& state) {
    const SemiprimeParts parts = fixture_semiprime(512);
    RandomSource rng = RandomSource::seeded(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_coprime(parts.n, rng));
    }
}
BENCHMARK(BM_SampleCoprime);

void BM_GenSemiprime(benchmark::State& state) {
    const unsigned bits = static_cast<unsigned>(state.range(0));
    RandomSource rng = RandomSource::seeded(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen_semiprime(bits, rng));
    }
}
BENCHMARK(BM_GenSemiprime)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zkpeap
