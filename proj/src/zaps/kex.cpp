#include "zaps/kex.hpp"

namespace zaps::kex {

static KeyPair normalized(const Curve& curve, Scalar secret, CurvePoint pub) {
    if (!pub.inf && mpz_odd_p(pub.y.get_mpz_t())) {
        secret = curve.s_neg(secret);
        pub = curve.neg(pub);
    }
    return KeyPair{std::move(secret), std::move(pub)};
}

KeyPair gen_keypair(const Curve& curve, Rng& rng) {
    Scalar secret = curve.random_nonzero_scalar(rng);
    return normalized(curve, secret, curve.mul_g(secret));
}

KeyPair keypair_from_secret(const Curve& curve, const Scalar& secret) {
    if (secret.is_zero()) throw std::invalid_argument("keypair_from_secret: zero secret");
    return normalized(curve, secret, curve.mul_g(secret));
}

SharedSecret ecdh(const Curve& curve, const Scalar& secret, const CurvePoint& peer) {
    if (peer.inf) throw std::invalid_argument("ecdh: identity peer point");
    if (!curve.on_curve(peer)) throw std::invalid_argument("ecdh: peer point not on curve");
    if (secret.is_zero()) throw std::invalid_argument("ecdh: zero secret");
    CurvePoint shared = curve.mul(secret, peer);
    if (shared.inf) throw std::invalid_argument("ecdh: degenerate shared point");
    return SharedSecret{shared};
}

Digest32 kdf(const Curve& curve, const SharedSecret& secret, const Bytes& context) {
    if (secret.point.inf) throw std::invalid_argument("kdf: identity point");
    Bytes buf;
    auto x = curve.encode_x(secret.point);
    append(buf, x);
    append(buf, context);
    return sha256(buf);
}

SessionKey derive_session_key(const Curve& curve, const Scalar& own_nonce,
                              const CurvePoint& peer_ephemeral, const Bytes& transcript) {
    SharedSecret shared = ecdh(curve, own_nonce, peer_ephemeral);
    CurvePoint point = curve.normalize_even(shared.point);
    Digest32 key = kdf(curve, SharedSecret{point}, transcript);
    Bytes tag_input;
    append(tag_input, std::string_view("ZAPS-sk-tag"));
    append(tag_input, key);
    append(tag_input, transcript);
    return SessionKey{key, sha256(tag_input), point};
}

CurvePoint route_user(const Curve& c, const Scalar& r1, const CurvePoint& drone_eph) {
    return c.normalize_even(c.mul(r1, drone_eph));
}

CurvePoint route_drone(const Curve& c, const Scalar& r2, const CurvePoint& user_eph) {
    return c.normalize_even(c.mul(r2, user_eph));
}

CurvePoint route_server(const Curve& c, const Scalar& vs, const Scalar& r1, const Scalar& r2) {
    CurvePoint r2g = c.mul_g(r2);
    CurvePoint r1r2g = c.mul(r1, r2g);
    return c.normalize_even(c.mul(vs, r1r2g));
}

}  // namespace zaps::kex
