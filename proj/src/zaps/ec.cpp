#include "zaps/ec.hpp"

#include <stdexcept>

namespace zaps::ec {

std::array<uint8_t, 32> mpz_to_be32(const mpz_class& v) {
    if (sgn(v) < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 256) {
        throw std::invalid_argument("mpz_to_be32: out of range");
    }
    std::array<uint8_t, 32> out{};
    size_t count = 0;
    mpz_export(out.data() + 32 - (mpz_sizeinbase(v.get_mpz_t(), 256)), &count, 1, 1, 1, 0,
               v.get_mpz_t());
    return out;
}

mpz_class be32_to_mpz(const uint8_t* b32) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), 32, 1, 1, 1, 0, b32);
    return v;
}

Curve::Curve(CurveId id, const char* name, const mpz_class& p, const mpz_class& a,
             const mpz_class& b, const mpz_class& gx, const mpz_class& gy,
             const mpz_class& n, int security_bits)
    : id_(id), name_(name), p_(p), a_(a), b_(b), n_(n), security_bits_(security_bits) {
    g_ = CurvePoint{gx, gy, false, id_};
    ladder_bits_ = mpz_sizeinbase(n_.get_mpz_t(), 2);
    if (!on_curve(g_)) throw std::logic_error("Curve: generator not on curve");
}

mpz_class Curve::fe(const mpz_class& v) const {
    mpz_class r = v % p_;
    if (sgn(r) < 0) r += p_;
    return r;
}

void Curve::check(const Scalar& s) const {
    if (s.curve != id_) throw std::invalid_argument("scalar belongs to a different curve");
    if (sgn(s.v) < 0 || s.v >= n_) throw std::invalid_argument("scalar out of range");
}

void Curve::check(const CurvePoint& P) const {
    if (P.curve != id_) throw std::invalid_argument("point belongs to a different curve");
}

bool Curve::on_curve(const CurvePoint& P) const {
    if (P.curve != id_) return false;
    if (P.inf) return true;
    if (sgn(P.x) < 0 || P.x >= p_ || sgn(P.y) < 0 || P.y >= p_) return false;
    mpz_class lhs = fe(P.y * P.y);
    mpz_class rhs = fe(P.x * P.x * P.x + a_ * P.x + b_);
    return lhs == rhs;
}

CurvePoint Curve::neg(const CurvePoint& P) const {
    check(P);
    if (P.inf) return P;
    return CurvePoint{P.x, P.y == 0 ? mpz_class(0) : mpz_class(p_ - P.y), false, id_};
}

CurvePoint Curve::dbl(const CurvePoint& P) const {
    check(P);
    if (P.inf || P.y == 0) return identity();
    // lambda = (3x^2 + a) / (2y)
    mpz_class denom;
    mpz_class two_y = fe(2 * P.y);
    if (mpz_invert(denom.get_mpz_t(), two_y.get_mpz_t(), p_.get_mpz_t()) == 0) {
        throw std::logic_error("dbl: non-invertible denominator");
    }
    mpz_class lambda = fe((3 * P.x * P.x + a_) * denom);
    mpz_class x3 = fe(lambda * lambda - 2 * P.x);
    mpz_class y3 = fe(lambda * (P.x - x3) - P.y);
    return CurvePoint{x3, y3, false, id_};
}

CurvePoint Curve::add(const CurvePoint& P, const CurvePoint& Q) const {
    check(P);
    check(Q);
    if (P.inf) return Q;
    if (Q.inf) return P;
    if (P.x == Q.x) {
        if (P.y == Q.y) return dbl(P);
        return identity();  // P + (-P)
    }
    mpz_class dx = fe(Q.x - P.x);
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), dx.get_mpz_t(), p_.get_mpz_t()) == 0) {
        throw std::logic_error("add: non-invertible denominator");
    }
    mpz_class lambda = fe((Q.y - P.y) * inv);
    mpz_class x3 = fe(lambda * lambda - P.x - Q.x);
    mpz_class y3 = fe(lambda * (P.x - x3) - P.y);
    return CurvePoint{x3, y3, false, id_};
}

CurvePoint Curve::mul(const Scalar& k, const CurvePoint& P) const {
    check(k);
    check(P);
    // Ladder with a fixed iteration count: R0 and R1 both updated each step.
    CurvePoint r0 = identity();
    CurvePoint r1 = P;
    for (size_t i = ladder_bits_; i-- > 0;) {
        if (mpz_tstbit(k.v.get_mpz_t(), i)) {
            r0 = add(r0, r1);
            r1 = dbl(r1);
        } else {
            r1 = add(r0, r1);
            r0 = dbl(r0);
        }
    }
    return r0;
}

Scalar Curve::scalar(const mpz_class& v) const {
    mpz_class r = v % n_;
    if (sgn(r) < 0) r += n_;
    return Scalar{r, id_};
}

Scalar Curve::s_add(const Scalar& a, const Scalar& b) const {
    check(a);
    check(b);
    return scalar(a.v + b.v);
}

Scalar Curve::s_sub(const Scalar& a, const Scalar& b) const {
    check(a);
    check(b);
    return scalar(a.v - b.v);
}

Scalar Curve::s_mul(const Scalar& a, const Scalar& b) const {
    check(a);
    check(b);
    return scalar(a.v * b.v);
}

Scalar Curve::s_neg(const Scalar& a) const {
    check(a);
    return scalar(-a.v);
}

Scalar Curve::s_inv(const Scalar& a) const {
    check(a);
    if (a.v == 0) throw std::domain_error("s_inv: zero has no inverse");
    mpz_class r;
    mpz_invert(r.get_mpz_t(), a.v.get_mpz_t(), n_.get_mpz_t());
    return Scalar{r, id_};
}

Scalar Curve::scalar_from_digest(const Digest32& d) const {
    return scalar(be32_to_mpz(d.data()));
}

Scalar Curve::random_scalar(Rng& rng) const {
    // Rejection sampling over ladder_bits_ random bits.
    size_t nbytes = (ladder_bits_ + 7) / 8;
    unsigned top_mask = ladder_bits_ % 8 ? (1u << (ladder_bits_ % 8)) - 1 : 0xff;
    for (;;) {
        Bytes buf = rng.bytes(nbytes);
        buf[0] &= static_cast<uint8_t>(top_mask);
        mpz_class v;
        mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
        if (v < n_) return Scalar{v, id_};
    }
}

Scalar Curve::random_nonzero_scalar(Rng& rng) const {
    for (;;) {
        Scalar s = random_scalar(rng);
        if (!s.is_zero()) return s;
    }
}

std::array<uint8_t, 32> Curve::encode_x(const CurvePoint& P) const {
    check(P);
    if (P.inf) throw std::invalid_argument("encode_x: identity has no encoding");
    return mpz_to_be32(P.x);
}

std::optional<CurvePoint> Curve::decode_x(const uint8_t* b32) const {
    mpz_class x = be32_to_mpz(b32);
    if (x >= p_) return std::nullopt;
    mpz_class rhs = fe(x * x * x + a_ * x + b_);
    auto y = sqrt_mod_p(rhs);
    if (!y) return std::nullopt;
    CurvePoint P{x, *y, false, id_};
    if (mpz_odd_p(P.y.get_mpz_t())) P.y = p_ - P.y;
    if (!on_curve(P)) return std::nullopt;
    return P;
}

CurvePoint Curve::normalize_even(const CurvePoint& P) const {
    check(P);
    if (P.inf) return P;
    if (mpz_odd_p(P.y.get_mpz_t())) return neg(P);
    return P;
}

Bytes Curve::encode_full(const CurvePoint& P) const {
    check(P);
    Bytes out;
    if (P.inf) {
        out.push_back(0x00);
        return out;
    }
    out.push_back(0x04);
    auto x = mpz_to_be32(P.x);
    auto y = mpz_to_be32(P.y);
    append(out, x);
    append(out, y);
    return out;
}

std::array<uint8_t, 32> Curve::encode_scalar(const Scalar& s) const {
    check(s);
    return mpz_to_be32(s.v);
}

std::optional<Scalar> Curve::decode_scalar(const uint8_t* b32) const {
    mpz_class v = be32_to_mpz(b32);
    if (v >= n_) return std::nullopt;
    return Scalar{v, id_};
}

std::optional<mpz_class> Curve::sqrt_mod_p(const mpz_class& v) const {
    mpz_class a = fe(v);
    if (a == 0) return mpz_class(0);
    // Euler criterion.
    mpz_class exp = (p_ - 1) / 2;
    mpz_class legendre;
    mpz_powm(legendre.get_mpz_t(), a.get_mpz_t(), exp.get_mpz_t(), p_.get_mpz_t());
    if (legendre != 1) return std::nullopt;

    if (mpz_class(p_ % 4) == 3) {
        mpz_class e = (p_ + 1) / 4;
        mpz_class r;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p_.get_mpz_t());
        return r;
    }

    // Tonelli-Shanks: p - 1 = q * 2^s with q odd.
    mpz_class q = p_ - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q /= 2;
        ++s;
    }
    // Find a non-residue z.
    mpz_class z = 2;
    for (;;) {
        mpz_class l;
        mpz_powm(l.get_mpz_t(), z.get_mpz_t(), exp.get_mpz_t(), p_.get_mpz_t());
        if (l == p_ - 1) break;
        ++z;
    }
    mpz_class m(static_cast<unsigned long>(s));
    mpz_class c, t, r;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p_.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p_.get_mpz_t());
    mpz_class e2 = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e2.get_mpz_t(), p_.get_mpz_t());
    while (t != 1) {
        // Least i with t^(2^i) = 1.
        mpz_class tt = t;
        unsigned long i = 0;
        while (tt != 1) {
            tt = fe(tt * tt);
            ++i;
        }
        mpz_class b = c;
        for (mpz_class j = m - i - 1; j > 0; --j) b = fe(b * b);
        m = mpz_class(static_cast<unsigned long>(i));
        c = fe(b * b);
        t = fe(t * c);
        r = fe(r * b);
    }
    return r;
}

const Curve& secp256k1() {
    static const Curve c(
        CurveId::Secp256k1, "secp256k1",
        mpz_class("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f", 16),
        mpz_class(0), mpz_class(7),
        mpz_class("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798", 16),
        mpz_class("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8", 16),
        mpz_class("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141", 16),
        128);
    return c;
}

const Curve& tiny17() {
    static const Curve c(CurveId::Tiny17, "tiny17", mpz_class(17), mpz_class(2),
                         mpz_class(2), mpz_class(5), mpz_class(1), mpz_class(19), 0);
    return c;
}

const Curve& curve_by_id(CurveId id) {
    switch (id) {
        case CurveId::Secp256k1:
            return secp256k1();
        case CurveId::Tiny17:
            return tiny17();
    }
    throw std::invalid_argument("curve_by_id: unknown id");
}

const Curve* curve_by_name(std::string_view name) {
    if (name == "secp256k1") return &secp256k1();
    if (name == "tiny17") return &tiny17();
    return nullptr;
}

}  // namespace zaps::ec
