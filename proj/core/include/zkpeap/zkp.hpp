#pragma once

#include "zkpeap/numtheory.hpp"

namespace zkpeap {

/// Public statement: x is a quadratic residue modulo the semiprime n.
/// Invariants (checked by make_instance): 1 <= x < n, gcd(x, n) = 1,
/// jacobi(x, n) = +1.
struct PublicInstance {
    Modulus n;
    Nat x;
};

/// The prover's secret: a square root of x modulo n.
struct Witness {
    Nat w;
};

/// One round's commitment. u stays with the prover; y = u^2 mod n is sent.
struct RoundCommit {
    Nat u;
    Nat y;
};

/// Verifier's uniform challenge bit.
struct Challenge {
    uint8_t bit;
};

/// Prover's round response z = u * w^b mod n.
struct RoundProof {
    Nat z;
};

// Validates the instance invariants; throws std::invalid_argument.
PublicInstance make_instance(Modulus n, Nat x);

// Draws u uniformly from Z_n^* and commits y = u^2 mod n.
RoundCommit commit(const PublicInstance& instance, RandomSource& rng);

// b = 0 answers with u itself; b = 1 answers with u*w mod n.
RoundProof respond(const Witness& witness, const RoundCommit& commit,
                   Challenge challenge, const Modulus& n);

/// Round check: z^2 = y * x^b (mod n). Returns false (never throws) for any
/// degenerate input; in particular y or z outside [1, n) or sharing a factor
/// with n is rejected outright.
bool verify_round(const PublicInstance& instance, const Nat& y,
                  Challenge challenge, const RoundProof& proof);

/// Abstract verifier side for driving sequential rounds without committing
/// to a wire format.
class VerifierChannel {
public:
    virtual ~VerifierChannel() = default;

    // Deliver the round commitment, receive the challenge bit.
    virtual Challenge challenge_for(const Nat& y) = 0;

    // Deliver the round proof, learn whether the round verified.
    virtual bool round_passed(const RoundProof& proof) = 0;
};

/// Runs `rounds` sequential proof rounds; true iff every round verified.
/// Each round halves a cheater's chance, so the verifier's confidence after
/// m accepted rounds is 1 - 2^-m. rounds must be >= 1.
bool prove_sequential(const PublicInstance& instance, const Witness& witness,
                      unsigned rounds, RandomSource& rng,
                      VerifierChannel& verifier);

/// Dishonest-prover strategy: without the witness, guess the challenge bit
/// up front and publish y = u^2 * x^-guess mod n. The fixed answer z = u
/// verifies exactly when the actual challenge equals the guess, so each
/// round succeeds with probability 1/2.
struct CheatRound {
    uint8_t guess;
    Nat u;
    Nat y;
};

CheatRound cheat_round(const PublicInstance& instance, uint8_t guess,
                       RandomSource& rng);

// The cheater's only possible answer.
RoundProof cheat_answer(const CheatRound& round);

}  // namespace zkpeap
