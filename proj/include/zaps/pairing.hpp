#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zaps/rng.hpp"

namespace zaps::pg {

// Prime order of the proof-system groups: q = 2^64 - 2^32 + 1.
inline constexpr uint64_t kOrder = 0xffffffff00000001ull;

// Element of F_q. Small struct so QAP polynomial arithmetic stays cheap.
struct Fq {
    uint64_t v = 0;

    constexpr Fq() = default;
    constexpr explicit Fq(uint64_t x) : v(x % kOrder) {}

    friend Fq operator+(Fq a, Fq b) {
        uint64_t s = a.v + b.v;
        if (s < a.v || s >= kOrder) s -= kOrder;
        return Fq::raw(s);
    }
    friend Fq operator-(Fq a, Fq b) {
        return Fq::raw(a.v >= b.v ? a.v - b.v : a.v + (kOrder - b.v));
    }
    friend Fq operator*(Fq a, Fq b) {
        return Fq::raw(static_cast<uint64_t>(
            (static_cast<__uint128_t>(a.v) * b.v) % kOrder));
    }
    Fq operator-() const { return Fq::raw(v == 0 ? 0 : kOrder - v); }
    bool operator==(const Fq&) const = default;

    static constexpr Fq raw(uint64_t x) {
        Fq f;
        f.v = x;
        return f;
    }
};

Fq fq_pow(Fq base, uint64_t exp);
// Throws std::domain_error for zero.
Fq fq_inv(Fq a);
Fq fq_random(Rng& rng);
Fq fq_random_nonzero(Rng& rng);

// ---- pairing groups -------------------------------------------------------
//
// Pedagogical bilinear setting: three groups of order q whose elements are
// represented directly by their discrete logarithm relative to the group
// generator ("exponent-transparent"). e(x*g1, y*g2) = gt^(x*y), so the
// bilinear identity checks below are exact arithmetic over F_q. By
// construction the representation hides nothing; it exists to exercise the
// verification equations at desk scale and is kept strictly separate from
// the elliptic-curve groups above.

enum class GroupTag : uint8_t { G1 = 1, G2 = 2, GT = 3 };

struct PairElem {
    GroupTag tag;
    Fq exp;

    bool operator==(const PairElem&) const = default;
};

inline PairElem g1(Fq e) { return PairElem{GroupTag::G1, e}; }
inline PairElem g2(Fq e) { return PairElem{GroupTag::G2, e}; }
inline PairElem gt(Fq e) { return PairElem{GroupTag::GT, e}; }
inline PairElem g1_gen() { return g1(Fq(1)); }
inline PairElem g2_gen() { return g2(Fq(1)); }

// Group operation; both operands must carry the same tag.
PairElem pg_add(const PairElem& a, const PairElem& b);
// Scalar multiplication (exponentiation written additively).
PairElem pg_scale(Fq k, const PairElem& a);
// The pairing map G1 x G2 -> GT; any other tag combination throws.
PairElem pair(const PairElem& a, const PairElem& b);

// ---- dense polynomials over F_q ------------------------------------------

// Coefficient vector, lowest degree first. Kept normalized (no trailing
// zero coefficients except for the zero polynomial, which is empty).
using Poly = std::vector<Fq>;

Poly poly_trim(Poly p);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
void poly_add_scaled(Poly& acc, Fq c, const Poly& p);
Fq poly_eval(const Poly& p, Fq x);
// Exact division; throws std::domain_error when a remainder survives.
Poly poly_divide_exact(const Poly& num, const Poly& den);

}  // namespace zaps::pg
