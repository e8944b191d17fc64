#pragma once

#include <gmpxx.h>

#include <optional>

#include "zaps/bytes.hpp"
#include "zaps/rng.hpp"

namespace zaps::ec {

enum class CurveId : uint8_t { Secp256k1 = 1, Tiny17 = 2 };

// Scalar in [0, n) for the curve's group order n. Tagged with the curve so
// that mixing scalars and points from different curves is caught, not silent.
struct Scalar {
    mpz_class v;
    CurveId curve;

    bool operator==(const Scalar& o) const { return curve == o.curve && v == o.v; }
    bool is_zero() const { return v == 0; }
};

// Affine point; inf marks the identity element.
struct CurvePoint {
    mpz_class x, y;
    bool inf = true;
    CurveId curve = CurveId::Secp256k1;

    bool operator==(const CurvePoint& o) const {
        if (curve != o.curve) return false;
        if (inf || o.inf) return inf == o.inf;
        return x == o.x && y == o.y;
    }
};

// Short-Weierstrass curve y^2 = x^3 + a*x + b over F_p with a generator of
// prime order n and cofactor 1.
class Curve {
public:
    Curve(CurveId id, const char* name, const mpz_class& p, const mpz_class& a,
          const mpz_class& b, const mpz_class& gx, const mpz_class& gy,
          const mpz_class& n, int security_bits);

    CurveId id() const { return id_; }
    const char* name() const { return name_; }
    const mpz_class& p() const { return p_; }
    const mpz_class& a() const { return a_; }
    const mpz_class& b() const { return b_; }
    const mpz_class& order() const { return n_; }
    const CurvePoint& generator() const { return g_; }
    CurvePoint identity() const { return CurvePoint{0, 0, true, id_}; }
    int security_bits() const { return security_bits_; }
    static constexpr const char* hash_name() { return "SHA-256"; }

    bool on_curve(const CurvePoint& P) const;

    CurvePoint add(const CurvePoint& P, const CurvePoint& Q) const;
    CurvePoint dbl(const CurvePoint& P) const;
    CurvePoint neg(const CurvePoint& P) const;

    // Montgomery ladder over a fixed number of iterations (the bit length of
    // n), one add and one double per step regardless of the scalar.
    CurvePoint mul(const Scalar& k, const CurvePoint& P) const;
    CurvePoint mul_g(const Scalar& k) const { return mul(k, g_); }

    // ---- scalar field (mod n) ----
    Scalar scalar(const mpz_class& v) const;
    Scalar scalar_u64(uint64_t v) const { return scalar(mpz_class(static_cast<unsigned long>(v))); }
    Scalar s_add(const Scalar& a, const Scalar& b) const;
    Scalar s_sub(const Scalar& a, const Scalar& b) const;
    Scalar s_mul(const Scalar& a, const Scalar& b) const;
    Scalar s_neg(const Scalar& a) const;
    // Throws std::domain_error for zero.
    Scalar s_inv(const Scalar& a) const;
    Scalar scalar_from_digest(const Digest32& d) const;
    // Uniform in [0, n) / [1, n) by rejection sampling.
    Scalar random_scalar(Rng& rng) const;
    Scalar random_nonzero_scalar(Rng& rng) const;

    // ---- encodings ----
    // 32-byte big-endian x coordinate. The identity has no encoding.
    std::array<uint8_t, 32> encode_x(const CurvePoint& P) const;
    // Reconstructs the even-y point for the given x; nullopt when x is not a
    // residue coordinate or not canonical (>= p).
    std::optional<CurvePoint> decode_x(const uint8_t* b32) const;
    // Flips the sign so y is even; identity passes through.
    CurvePoint normalize_even(const CurvePoint& P) const;
    // Uncompressed encoding for hash transcripts: 0x04 || x || y (0x00 for
    // the identity). Never parsed, only hashed.
    Bytes encode_full(const CurvePoint& P) const;

    std::array<uint8_t, 32> encode_scalar(const Scalar& s) const;
    std::optional<Scalar> decode_scalar(const uint8_t* b32) const;

    // sqrt mod p via Tonelli-Shanks (fast path for p = 3 mod 4).
    std::optional<mpz_class> sqrt_mod_p(const mpz_class& v) const;

private:
    CurveId id_;
    const char* name_;
    mpz_class p_, a_, b_, n_;
    CurvePoint g_;
    size_t ladder_bits_;
    int security_bits_;

    void check(const Scalar& s) const;
    void check(const CurvePoint& P) const;
    mpz_class fe(const mpz_class& v) const;  // reduce into [0, p)
};

// Production parameters.
const Curve& secp256k1();

// Tiny curve y^2 = x^3 + 2x + 2 over F_17, generator (5,1) of order 19.
// Small enough that tests can enumerate the whole group independently.
const Curve& tiny17();

const Curve& curve_by_id(CurveId id);
const Curve* curve_by_name(std::string_view name);

std::array<uint8_t, 32> mpz_to_be32(const mpz_class& v);
mpz_class be32_to_mpz(const uint8_t* b32);

}  // namespace zaps::ec
