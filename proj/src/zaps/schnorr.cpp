#include "zaps/schnorr.hpp"

namespace zaps::snark {

static Scalar challenge(const Curve& curve, const std::array<uint8_t, 32>& k_enc,
                        const PedersenCommitment& commitment, const Bytes& context) {
    Bytes buf;
    append(buf, std::string_view("ZAPS-schnorr"));
    append(buf, k_enc);
    append(buf, curve.encode_full(commitment.point));
    append(buf, context);
    return curve.scalar_from_digest(sha256(buf));
}

std::array<uint8_t, 128> schnorr_prove(const Curve& curve, const PedersenCommitment& commitment,
                                       const Scalar& opening, const Bytes& context, Rng& rng) {
    if (!(curve.mul_g(opening) == commitment.point)) {
        throw WitnessInvalid("schnorr_prove: opening does not match commitment");
    }
    Scalar k = curve.random_nonzero_scalar(rng);
    CurvePoint K = curve.mul_g(k);
    if (mpz_odd_p(K.y.get_mpz_t())) {
        k = curve.s_neg(k);
        K = curve.neg(K);
    }
    auto k_enc = curve.encode_x(K);
    Scalar c = challenge(curve, k_enc, commitment, context);
    Scalar z = curve.s_add(k, curve.s_mul(c, opening));

    std::array<uint8_t, 128> out{};
    std::memcpy(out.data(), k_enc.data(), 32);
    auto cb = curve.encode_scalar(c);
    auto zb = curve.encode_scalar(z);
    std::memcpy(out.data() + 32, cb.data(), 32);
    std::memcpy(out.data() + 64, zb.data(), 32);
    // bytes 96..127 stay zero
    return out;
}

bool schnorr_verify(const Curve& curve, const PedersenCommitment& commitment,
                    const uint8_t* e, const Bytes& context) {
    for (int i = 96; i < 128; ++i) {
        if (e[i] != 0) return false;
    }
    auto K = curve.decode_x(e);
    auto c = curve.decode_scalar(e + 32);
    auto z = curve.decode_scalar(e + 64);
    if (!K || !c || !z) return false;
    if (commitment.point.inf || !curve.on_curve(commitment.point)) return false;

    std::array<uint8_t, 32> k_enc;
    std::memcpy(k_enc.data(), e, 32);
    if (!(challenge(curve, k_enc, commitment, context) == *c)) return false;

    CurvePoint lhs = curve.mul_g(*z);
    CurvePoint rhs = curve.add(*K, curve.mul(*c, commitment.point));
    return lhs == rhs;
}

}  // namespace zaps::snark
