#pragma once

#include "zaps/ec.hpp"
#include "zaps/hash.hpp"

namespace zaps::kex {

using ec::Curve;
using ec::CurvePoint;
using ec::Scalar;

// Long-term or ephemeral keypair. Public keys are normalized to even y (the
// secret is negated to match) so the 32-byte x-only wire form round-trips to
// exactly the point that was generated.
struct KeyPair {
    Scalar secret;
    CurvePoint pub;
};

struct SharedSecret {
    CurvePoint point;
};

// Symmetric session key plus a tag binding it to the transcript it was
// derived under. Both honest endpoints compute identical values.
struct SessionKey {
    Digest32 key;
    Digest32 tag;
    CurvePoint point;  // r1*r2*Vs*G, normalized
};

// Secret uniform in [1, n-1]; public = secret*G, even-y normalized.
KeyPair gen_keypair(const Curve& curve, Rng& rng);

// Builds the pair for a caller-chosen secret (registration fixtures, tests).
// Rejects the zero scalar.
KeyPair keypair_from_secret(const Curve& curve, const Scalar& secret);

// Classic DH: secret * peer_point. The peer point must be on the curve and
// not the identity, and the result must not degenerate to the identity.
SharedSecret ecdh(const Curve& curve, const Scalar& secret, const CurvePoint& peer);

// key = SHA-256(x-coordinate || context). The x coordinate is the 32-byte
// big-endian encoding, identical for a point and its negation, so both ends
// of an x-only exchange agree.
Digest32 kdf(const Curve& curve, const SharedSecret& secret, const Bytes& context);

// One endpoint's half of the relayed three-party exchange: own_nonce * peer
// ephemeral, then key = kdf(x || transcript). Both honest endpoints land on
// the same (normalized) point and the same key bytes.
SessionKey derive_session_key(const Curve& curve, const Scalar& own_nonce,
                              const CurvePoint& peer_ephemeral, const Bytes& transcript);

// The three derivation routes to the joint key point r1*r2*Vs*G, as each
// role computes it. Used to state key agreement as an arithmetic property
// over random draws; the live server never learns the joint key.
CurvePoint route_user(const Curve& c, const Scalar& r1, const CurvePoint& drone_eph);
CurvePoint route_drone(const Curve& c, const Scalar& r2, const CurvePoint& user_eph);
CurvePoint route_server(const Curve& c, const Scalar& vs, const Scalar& r1, const Scalar& r2);

}  // namespace zaps::kex
