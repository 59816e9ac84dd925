#include "zkpeap/zkp.hpp"

#include <stdexcept>

namespace zkpeap {

PublicInstance make_instance(Modulus n, Nat x) {
    if (x < 1 || x >= n.value()) {
        throw std::invalid_argument("instance: x must satisfy 1 <= x < n");
    }
    if (gcd(x, n.value()) != 1) {
        throw std::invalid_argument("instance: x must be coprime to n");
    }
    if (jacobi(x, n) != 1) {
        throw std::invalid_argument("instance: jacobi(x, n) must be +1");
    }
    return PublicInstance{std::move(n), std::move(x)};
}

RoundCommit commit(const PublicInstance& instance, RandomSource& rng) {
    Nat u = sample_coprime(instance.n, rng);
    Nat y = mod_sq(u, instance.n);
    return RoundCommit{std::move(u), std::move(y)};
}

RoundProof respond(const Witness& witness, const RoundCommit& commit,
                   Challenge challenge, const Modulus& n) {
    if (challenge.bit == 0) {
        return RoundProof{commit.u};
    }
    return RoundProof{mod_mul(commit.u, witness.w, n)};
}

bool verify_round(const PublicInstance& instance, const Nat& y,
                  Challenge challenge, const RoundProof& proof) {
    const Nat& n = instance.n.value();
    if (y < 1 || y >= n || proof.z < 1 || proof.z >= n) {
        return false;
    }
    // z = 0 against y = 0 would trivially check out; requiring units
    // excludes that whole degenerate family.
    if (gcd(y, n) != 1 || gcd(proof.z, n) != 1) {
        return false;
    }
    Nat expected = y;
    if (challenge.bit != 0) {
        expected = mod_mul(y, instance.x, instance.n);
    }
    return mod_sq(proof.z, instance.n) == expected;
}

bool prove_sequential(const PublicInstance& instance, const Witness& witness,
                      unsigned rounds, RandomSource& rng,
                      VerifierChannel& verifier) {
    if (rounds < 1) {
        throw std::invalid_argument("prove_sequential: rounds must be >= 1");
    }
    for (unsigned i = 0; i < rounds; ++i) {
        const RoundCommit round = commit(instance, rng);
        const Challenge challenge = verifier.challenge_for(round.y);
        const RoundProof proof = respond(witness, round, challenge, instance.n);
        if (!verifier.round_passed(proof)) {
            return false;
        }
    }
    return true;
}

CheatRound cheat_round(const PublicInstance& instance, uint8_t guess,
                       RandomSource& rng) {
    Nat u = sample_coprime(instance.n, rng);
    Nat y = mod_sq(u, instance.n);
    if (guess != 0) {
        // x is a unit, so the inverse always exists.
        const auto x_inv = mod_inverse(instance.x, instance.n);
        y = mod_mul(y, *x_inv, instance.n);
    }
    return CheatRound{guess, std::move(u), std::move(y)};
}

RoundProof cheat_answer(const CheatRound& round) {
    return RoundProof{round.u};
}

}  // namespace zkpeap
