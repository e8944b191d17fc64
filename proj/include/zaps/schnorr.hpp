#pragma once

#include "zaps/commit.hpp"
#include "zaps/snark.hpp"

namespace zaps::snark {

// Fiat-Shamir proof of knowledge of s with C = s*G (the opening scalar of a
// Pedersen commitment). Envelope layout, 128 bytes:
//   K (32, x-only even-y) || c (32) || z (32) || zero padding (32).
// The challenge binds the nonce point, the commitment and a caller context,
// so the same commitment proven under different contexts yields different
// challenges.

std::array<uint8_t, 128> schnorr_prove(const Curve& curve, const PedersenCommitment& commitment,
                                       const Scalar& opening, const Bytes& context, Rng& rng);

bool schnorr_verify(const Curve& curve, const PedersenCommitment& commitment,
                    const uint8_t* envelope128, const Bytes& context);

}  // namespace zaps::snark
