#include "zkpeap/numtheory.hpp"

#include <gtest/gtest.h>

#include <array>
#include <map>
#include <set>

namespace zkpeap {
namespace {

// Schoolbook oracles on machine integers, independent of the Nat-based
// implementations they check.
uint64_t oracle_pow_mod(uint64_t a, uint64_t e, uint64_t n) {
    uint64_t result = 1 % n;
    a %= n;
    for (uint64_t i = 0; i < e; ++i) {
        result = (result * a) % n;
    }
    return result;
}

uint64_t oracle_gcd(uint64_t a, uint64_t b) {
    for (uint64_t d = std::min(a, b); d >= 1; --d) {
        if (a % d == 0 && b % d == 0) {
            return d;
        }
    }
    return std::max(a, b);
}

std::vector<uint32_t> sieve_primes(uint32_t limit) {
    std::vector<bool> composite(limit, false);
    std::vector<uint32_t> primes;
    for (uint32_t i = 2; i < limit; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            for (uint64_t j = uint64_t{i} * i; j < limit; j += i) {
                composite[j] = true;
            }
        }
    }
    return primes;
}

TEST(ModMul, Examples) {
    const Modulus n{77};
    EXPECT_EQ(mod_mul(18, 18, n), 16);  // 324 mod 77
    EXPECT_EQ(mod_mul(1, 42, n), 42);
    EXPECT_EQ(mod_mul(0, 42, n), 0);
}

TEST(ModSq, Examples) {
    EXPECT_EQ(mod_sq(6, Modulus{11}), 3);  // 6^2 = 36 = 3 (mod 11)
    EXPECT_EQ(mod_sq(0, Modulus{77}), 0);
    EXPECT_EQ(mod_sq(9, Modulus{77}), 4);  // 81 - 77
}

TEST(ModPow, Examples) {
    const Modulus eleven{11};
    EXPECT_EQ(mod_pow(3, 5, eleven), 1);   // 3^((11-1)/2) = 243 = 1
    EXPECT_EQ(mod_pow(6, 5, eleven), 10);  // 6^((11-1)/2) = 7776 = -1
    EXPECT_EQ(mod_pow(42 % 11, 0, eleven), 1);
}

TEST(ModPow, MatchesIteratedMultiplication) {
    for (uint64_t n = 3; n < 100; n += 2) {
        const Modulus mod{n};
        for (uint64_t a = 0; a < 50; ++a) {
            for (uint64_t e = 0; e < 50; ++e) {
                ASSERT_EQ(mod_pow(a % n, e, mod), oracle_pow_mod(a, e, n))
                    << "a=" << a << " e=" << e << " n=" << n;
            }
        }
    }
}

TEST(Gcd, Examples) {
    EXPECT_EQ(gcd(36, 11), 1);
    EXPECT_EQ(gcd(6, 77), 1);
    EXPECT_EQ(gcd(22, 77), 11);
}

TEST(Gcd, MatchesTrialDivisionOracle) {
    for (uint64_t a = 1; a < 120; ++a) {
        for (uint64_t b = 1; b < 120; ++b) {
            ASSERT_EQ(gcd(a, b), oracle_gcd(a, b));
        }
    }
}

TEST(Modulus, RejectsEvenAndTiny) {
    EXPECT_THROW(Modulus{10}, std::invalid_argument);
    EXPECT_THROW(Modulus{2}, std::invalid_argument);
    EXPECT_THROW(Modulus{0}, std::invalid_argument);
    EXPECT_NO_THROW(Modulus{3});
}

TEST(Jacobi, WorkedExamples) {
    EXPECT_EQ(jacobi(3, Modulus{11}), 1);    // residue: 5^2 = 3 (mod 11)
    EXPECT_EQ(jacobi(6, Modulus{11}), -1);   // non-residue
    EXPECT_EQ(jacobi(22, Modulus{77}), 0);   // gcd(22, 77) = 11
}

// For prime p, the symbol must match both the exponentiation rule
// x^((p-1)/2) and a brute-force table of squares.
TEST(Jacobi, LegendreEquivalenceForPrimes) {
    for (uint32_t p : sieve_primes(200)) {
        if (p == 2) {
            continue;
        }
        const Modulus mod{p};
        std::set<uint64_t> squares;
        for (uint64_t w = 1; w < p; ++w) {
            squares.insert((w * w) % p);
        }
        for (uint64_t x = 1; x < p; ++x) {
            const int symbol = jacobi(x, mod);
            const int expected = squares.count(x) ? 1 : -1;
            ASSERT_EQ(symbol, expected) << "x=" << x << " p=" << p;

            const uint64_t euler = oracle_pow_mod(x, (p - 1) / 2, p);
            const int by_euler = euler == 1 ? 1 : (euler == p - 1 ? -1 : 0);
            ASSERT_EQ(symbol, by_euler) << "x=" << x << " p=" << p;
        }
    }
}

TEST(Jacobi, MultiplicativeInModulus) {
    for (uint64_t n = 3; n < 100; n += 2) {
        for (uint64_t m = 3; m < 100; m += 2) {
            if (oracle_gcd(n, m) != 1) {
                continue;
            }
            const Modulus nm{n * m};
            for (uint64_t x = 0; x < n * m; x += 7) {  // stride keeps it quick
                ASSERT_EQ(jacobi(x, nm),
                          jacobi(x, Modulus{n}) * jacobi(x, Modulus{m}));
            }
        }
    }
}

TEST(ModInverse, RoundTripsAndRejectsNonUnits) {
    const Modulus n{77};
    for (uint64_t a = 1; a < 77; ++a) {
        const auto inv = mod_inverse(a, n);
        if (oracle_gcd(a, 77) == 1) {
            ASSERT_TRUE(inv.has_value());
            ASSERT_EQ(mod_mul(a, *inv, n), 1);
        } else {
            ASSERT_FALSE(inv.has_value());
        }
    }
}

TEST(IsProbablePrime, KnownFactorizations) {
    RandomSource rng = RandomSource::seeded(1);
    EXPECT_TRUE(is_probable_prime(1997, 40, rng));   // 1997 is prime
    EXPECT_FALSE(is_probable_prime(1995, 40, rng));  // 3 * 5 * 7 * 19
    EXPECT_FALSE(is_probable_prime(1996, 40, rng));  // 2^2 * 499
    EXPECT_FALSE(is_probable_prime(1998, 40, rng));  // 2 * 3^3 * 37
    EXPECT_TRUE(is_probable_prime(2, 40, rng));
    EXPECT_FALSE(is_probable_prime(1, 40, rng));
    EXPECT_FALSE(is_probable_prime(0, 40, rng));
}

TEST(IsProbablePrime, AgreesWithSieveBelowMillion) {
    constexpr uint32_t limit = 1'000'000;
    std::vector<bool> composite(limit, false);
    for (uint32_t i = 2; i < limit; ++i) {
        if (!composite[i]) {
            for (uint64_t j = uint64_t{i} * i; j < limit; j += i) {
                composite[j] = true;
            }
        }
    }
    RandomSource rng = RandomSource::seeded(2);
    for (uint32_t i = 2; i < limit; ++i) {
        ASSERT_EQ(is_probable_prime(i, 5, rng), !composite[i]) << i;
    }
}

TEST(GenSemiprime, SmallProfile) {
    RandomSource rng = RandomSource::seeded(3);
    const SemiprimeParts parts = gen_semiprime(16, rng);
    EXPECT_NE(parts.p, parts.q);
    EXPECT_EQ(parts.p * parts.q, parts.n.value());
    EXPECT_GE(bit_length(parts.n.value()), 16u);
    // Factors really are prime: trial-divide them.
    for (const Nat& f : {parts.p, parts.q}) {
        const auto v = static_cast<uint64_t>(f);
        for (uint64_t d = 2; d * d <= v; ++d) {
            ASSERT_NE(v % d, 0u) << v;
        }
    }
    EXPECT_THROW(gen_semiprime(8, rng), std::invalid_argument);
}

TEST(GenSemiprime, ProductionWidth) {
    RandomSource rng = RandomSource::seeded(4);
    const SemiprimeParts parts = gen_semiprime(512, rng);
    EXPECT_GE(bit_length(parts.n.value()), 512u);
}

TEST(GenSemiprime, DistinctFactorsOverManyDraws) {
    RandomSource rng = RandomSource::seeded(5);
    for (int i = 0; i < 10'000; ++i) {
        const SemiprimeParts parts = gen_semiprime(32, rng);
        ASSERT_NE(parts.p, parts.q);
    }
}

TEST(GenSemiprime, SquaresHaveJacobiPlusOne) {
    RandomSource rng = RandomSource::seeded(6);
    for (int i = 0; i < 32; ++i) {
        const SemiprimeParts parts = gen_semiprime(48, rng);
        const Nat w = sample_coprime(parts.n, rng);
        EXPECT_EQ(jacobi(mod_sq(w, parts.n), parts.n), 1);
    }
}

TEST(SampleCoprime, AlwaysCoprimeAndInRange) {
    RandomSource rng = RandomSource::seeded(7);
    const Modulus n{77};
    for (int i = 0; i < 20'000; ++i) {
        const Nat u = sample_coprime(n, rng);
        ASSERT_GE(u, 1);
        ASSERT_LT(u, 77);
        ASSERT_EQ(gcd(u, 77), 1);
        ASSERT_NE(u % 7, 0);
        ASSERT_NE(u % 11, 0);
    }
}

TEST(SampleCoprime, UniformOverUnits) {
    // Chi-squared over the 60 units of Z_77*; df = 59, alpha = 0.001.
    constexpr double kCritical = 98.3242;  // chi2 quantile at 0.999, df = 59
    constexpr int kDraws = 100'000;
    RandomSource rng = RandomSource::seeded(8);
    const Modulus n{77};
    std::map<uint64_t, int> histogram;
    for (int i = 0; i < kDraws; ++i) {
        histogram[static_cast<uint64_t>(sample_coprime(n, rng))]++;
    }
    ASSERT_EQ(histogram.size(), 60u);
    const double expected = double{kDraws} / 60.0;
    double chi2 = 0;
    for (const auto& [value, count] : histogram) {
        const double diff = count - expected;
        chi2 += diff * diff / expected;
    }
    EXPECT_LT(chi2, kCritical);
}

TEST(NatBytes, MinimalBigEndianRoundTrip) {
    EXPECT_EQ(nat_to_bytes(0), std::vector<uint8_t>{0x00});
    EXPECT_EQ(nat_to_bytes(1), std::vector<uint8_t>{0x01});
    EXPECT_EQ(nat_to_bytes(256), (std::vector<uint8_t>{0x01, 0x00}));
    RandomSource rng = RandomSource::seeded(9);
    for (int i = 0; i < 1000; ++i) {
        const Nat v = rng.below(Nat(1) << 200);
        const auto bytes = nat_to_bytes(v);
        EXPECT_EQ(nat_from_bytes(bytes), v);
        if (v != 0) {
            EXPECT_NE(bytes[0], 0);  // minimal encoding
        }
    }
}

TEST(RandomSource, BelowStaysInRangeAndHitsEverything) {
    RandomSource rng = RandomSource::seeded(10);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const Nat v = rng.below(7);
        ASSERT_LT(v, 7);
        seen.insert(static_cast<uint64_t>(v));
    }
    EXPECT_EQ(seen.size(), 7u);
}

}  // namespace
}  // namespace zkpeap
