#include "zkpeap/numtheory.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace zkpeap {
namespace {

// Odd primes below 2048 for cheap trial division ahead of Miller-Rabin.
const std::vector<uint32_t>& small_primes() {
    static const std::vector<uint32_t> primes = [] {
        constexpr uint32_t limit = 2048;
        std::array<bool, limit> composite{};
        std::vector<uint32_t> out;
        for (uint32_t i = 3; i < limit; i += 2) {
            if (!composite[i]) {
                out.push_back(i);
                for (uint32_t j = i * i; j < limit; j += 2 * i) {
                    composite[j] = true;
                }
            }
        }
        return out;
    }();
    return primes;
}

// One Miller-Rabin round for odd p >= 5 with witness base a in [2, p-2].
// p - 1 = d * 2^s with d odd.
bool miller_rabin_round(const Nat& p_minus_1, const Nat& d, unsigned s,
                        const Nat& base, const Modulus& mod) {
    Nat x = mod_pow(base, d, mod);
    if (x == 1 || x == p_minus_1) {
        return true;
    }
    for (unsigned i = 1; i < s; ++i) {
        x = mod_sq(x, mod);
        if (x == p_minus_1) {
            return true;
        }
        if (x == 1) {
            return false;
        }
    }
    return false;
}

// Random probable prime with exactly `bits` bits. The two most significant
// bits are forced so that a product of two such primes always reaches the
// requested modulus size.
Nat gen_prime(unsigned bits, RandomSource& rng) {
    const Nat top = (Nat(1) << (bits - 1)) | (Nat(1) << (bits - 2));
    const Nat span = Nat(1) << (bits - 2);
    for (;;) {
        Nat candidate = top | rng.below(span) | 1;
        if (is_probable_prime(candidate, kDefaultPrimalityRounds, rng)) {
            return candidate;
        }
    }
}

}  // namespace

Modulus::Modulus(Nat n) : n_(std::move(n)) {
    if (n_ < 3) {
        throw std::invalid_argument("Modulus: value must be >= 3");
    }
    if ((n_ & 1) == 0) {
        throw std::invalid_argument("Modulus: value must be odd");
    }
}

Nat mod_mul(const Nat& a, const Nat& b, const Modulus& n) {
    return (a * b) % n.value();
}

Nat mod_sq(const Nat& a, const Modulus& n) {
    return (a * a) % n.value();
}

Nat mod_pow(const Nat& a, const Nat& e, const Modulus& n) {
    Nat base = a % n.value();
    Nat exp = e;
    Nat result = 1;
    while (exp > 0) {
        if ((exp & 1) != 0) {
            result = mod_mul(result, base, n);
        }
        base = mod_sq(base, n);
        exp >>= 1;
    }
    return result;
}

Nat gcd(Nat a, Nat b) {
    while (b != 0) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

int jacobi(const Nat& x, const Modulus& modulus) {
    Nat a = x % modulus.value();
    Nat n = modulus.value();
    int result = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            const unsigned r = static_cast<unsigned>(n & 7);
            if (r == 3 || r == 5) {
                result = -result;
            }
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) {
            result = -result;
        }
        a %= n;
    }
    return n == 1 ? result : 0;
}

std::optional<Nat> mod_inverse(const Nat& a, const Modulus& n) {
    // Extended Euclid over signed intermediates.
    Nat r0 = n.value();
    Nat r1 = a % n.value();
    Nat t0 = 0;
    Nat t1 = 1;
    while (r1 != 0) {
        const Nat q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) {
        return std::nullopt;
    }
    if (t0 < 0) {
        t0 += n.value();
    }
    return t0;
}

bool is_probable_prime(const Nat& p, unsigned rounds, RandomSource& rng) {
    if (p < 2) {
        return false;
    }
    if (p == 2 || p == 3) {
        return true;
    }
    if ((p & 1) == 0) {
        return false;
    }
    for (uint32_t q : small_primes()) {
        if (p == q) {
            return true;
        }
        if (p % q == 0) {
            return false;
        }
    }

    const Nat p_minus_1 = p - 1;
    Nat d = p_minus_1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }

    const Modulus mod{p};
    const Nat base_span = p - 3;  // bases drawn from [2, p-2]
    for (unsigned i = 0; i < rounds; ++i) {
        const Nat base = rng.below(base_span) + 2;
        if (!miller_rabin_round(p_minus_1, d, s, base, mod)) {
            return false;
        }
    }
    return true;
}

SemiprimeParts gen_semiprime(unsigned bits, RandomSource& rng) {
    if (bits < 16) {
        throw std::invalid_argument("gen_semiprime: bits must be >= 16");
    }
    const unsigned factor_bits = (bits + 1) / 2;
    Nat p = gen_prime(factor_bits, rng);
    Nat q = gen_prime(factor_bits, rng);
    while (q == p) {
        q = gen_prime(factor_bits, rng);
    }
    Nat n = p * q;
    return SemiprimeParts{Modulus{std::move(n)}, std::move(p), std::move(q)};
}

Nat sample_coprime(const Modulus& n, RandomSource& rng) {
    for (;;) {
        Nat u = rng.below(n.value());
        if (u >= 1 && gcd(u, n.value()) == 1) {
            return u;
        }
    }
}

}  // namespace zkpeap
