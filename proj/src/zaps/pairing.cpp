#include "zaps/pairing.hpp"

namespace zaps::pg {

Fq fq_pow(Fq base, uint64_t exp) {
    Fq r(1);
    Fq b = base;
    while (exp) {
        if (exp & 1) r = r * b;
        b = b * b;
        exp >>= 1;
    }
    return r;
}

Fq fq_inv(Fq a) {
    if (a.v == 0) throw std::domain_error("fq_inv: zero has no inverse");
    return fq_pow(a, kOrder - 2);
}

Fq fq_random(Rng& rng) { return Fq::raw(rng.below(kOrder)); }

Fq fq_random_nonzero(Rng& rng) {
    for (;;) {
        Fq f = fq_random(rng);
        if (f.v != 0) return f;
    }
}

PairElem pg_add(const PairElem& a, const PairElem& b) {
    if (a.tag != b.tag) throw std::invalid_argument("pg_add: mismatched groups");
    return PairElem{a.tag, a.exp + b.exp};
}

PairElem pg_scale(Fq k, const PairElem& a) { return PairElem{a.tag, k * a.exp}; }

PairElem pair(const PairElem& a, const PairElem& b) {
    if (a.tag != GroupTag::G1 || b.tag != GroupTag::G2) {
        throw std::invalid_argument("pair: expects (G1, G2)");
    }
    return gt(a.exp * b.exp);
}

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back().v == 0) p.pop_back();
    return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < r.size(); ++i) {
        Fq x = i < a.size() ? a[i] : Fq();
        Fq y = i < b.size() ? b[i] : Fq();
        r[i] = x + y;
    }
    return poly_trim(std::move(r));
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < r.size(); ++i) {
        Fq x = i < a.size() ? a[i] : Fq();
        Fq y = i < b.size() ? b[i] : Fq();
        r[i] = x - y;
    }
    return poly_trim(std::move(r));
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].v == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    return poly_trim(std::move(r));
}

void poly_add_scaled(Poly& acc, Fq c, const Poly& p) {
    if (c.v == 0) return;
    if (acc.size() < p.size()) acc.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i) acc[i] = acc[i] + c * p[i];
}

Fq poly_eval(const Poly& p, Fq x) {
    Fq acc;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

Poly poly_divide_exact(const Poly& num, const Poly& den) {
    Poly n = poly_trim(num);
    Poly d = poly_trim(den);
    if (d.empty()) throw std::domain_error("poly_divide_exact: division by zero");
    if (n.empty()) return {};
    if (n.size() < d.size()) throw std::domain_error("poly_divide_exact: remainder");
    Poly quot(n.size() - d.size() + 1);
    Fq lead_inv = fq_inv(d.back());
    for (size_t i = quot.size(); i-- > 0;) {
        Fq c = n[i + d.size() - 1] * lead_inv;
        quot[i] = c;
        if (c.v == 0) continue;
        for (size_t j = 0; j < d.size(); ++j) {
            n[i + j] = n[i + j] - c * d[j];
        }
    }
    for (const Fq& c : n) {
        if (c.v != 0) throw std::domain_error("poly_divide_exact: remainder");
    }
    return poly_trim(std::move(quot));
}

}  // namespace zaps::pg
