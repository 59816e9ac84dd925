#pragma once

#include "zkpeap/nat.hpp"
#include "zkpeap/rng.hpp"

#include <optional>

namespace zkpeap {

/// An odd modulus >= 3. Production deployments require semiprimes of at
/// least 512 bits; that floor is enforced at the configuration layer so
/// tests can run with small values.
class Modulus {
public:
    // Throws std::invalid_argument for even or < 3 values.
    explicit Modulus(Nat n);

    const Nat& value() const { return n_; }

    friend bool operator==(const Modulus&, const Modulus&) = default;

private:
    Nat n_;
};

// (a * b) mod n. Callers keep a, b < n.
Nat mod_mul(const Nat& a, const Nat& b, const Modulus& n);

// a^2 mod n.
Nat mod_sq(const Nat& a, const Modulus& n);

// a^e mod n by square-and-multiply; a^0 = 1.
Nat mod_pow(const Nat& a, const Nat& e, const Modulus& n);

// Greatest common divisor, Euclid's algorithm. gcd(0, 0) is undefined.
Nat gcd(Nat a, Nat b);

/// Jacobi symbol (x/n) in {-1, 0, +1}, computed with the binary
/// quadratic-reciprocity algorithm: no factorization of n is needed, and it
/// agrees with the product of Legendre symbols over n's prime factors.
int jacobi(const Nat& x, const Modulus& n);

// Inverse of a modulo n when gcd(a, n) = 1, by extended Euclid.
std::optional<Nat> mod_inverse(const Nat& a, const Modulus& n);

inline constexpr unsigned kDefaultPrimalityRounds = 40;

/// Miller-Rabin with `rounds` random bases after small-prime trial division.
/// A composite survives with probability <= 4^-rounds. Requires p >= 2.
bool is_probable_prime(const Nat& p, unsigned rounds, RandomSource& rng);

struct SemiprimeParts {
    Modulus n;
    Nat p;
    Nat q;
};

/// Random semiprime n = p*q with distinct odd probable primes p, q and
/// bit_length(n) >= bits. The factors are returned to the enrollment caller
/// only; nothing in this library persists or transmits them. bits >= 16.
SemiprimeParts gen_semiprime(unsigned bits, RandomSource& rng);

// Uniform u with 1 <= u < n and gcd(u, n) = 1, by rejection sampling.
Nat sample_coprime(const Modulus& n, RandomSource& rng);

}  // namespace zkpeap
