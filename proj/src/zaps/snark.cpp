#include "zaps/snark.hpp"

#include <fstream>

namespace zaps::snark {

using pg::g1;
using pg::g2;
using pg::PairElem;

Fq LinComb::eval(const std::vector<Fq>& z) const {
    Fq acc;
    for (const auto& [wire, coeff] : terms) acc = acc + coeff * z[wire];
    return acc;
}

R1CSystem::R1CSystem(uint32_t num_public)
    : num_wires_(1 + num_public), num_public_(num_public) {}

uint32_t R1CSystem::allocate_wire() { return num_wires_++; }

void R1CSystem::add_constraint(LinComb a, LinComb b, LinComb c) {
    for (const LinComb* lc : {&a, &b, &c}) {
        for (const auto& [wire, coeff] : lc->terms) {
            if (wire >= num_wires_) throw std::out_of_range("add_constraint: unknown wire");
        }
    }
    constraints_.push_back(Constraint{std::move(a), std::move(b), std::move(c)});
}

bool R1CSystem::satisfied(const std::vector<Fq>& z) const {
    return first_violation(z) < 0;
}

long R1CSystem::first_violation(const std::vector<Fq>& z) const {
    if (z.size() != num_wires_) return 0;
    if (!(z[0] == Fq(1))) return 0;
    for (size_t k = 0; k < constraints_.size(); ++k) {
        const Constraint& c = constraints_[k];
        if (!(c.a.eval(z) * c.b.eval(z) == c.c.eval(z))) return static_cast<long>(k);
    }
    return -1;
}

Digest32 R1CSystem::digest() const {
    Bytes buf;
    append_u32be(buf, num_wires_);
    append_u32be(buf, num_public_);
    append_u32be(buf, static_cast<uint32_t>(constraints_.size()));
    auto put_lc = [&buf](const LinComb& lc) {
        append_u32be(buf, static_cast<uint32_t>(lc.terms.size()));
        for (const auto& [wire, coeff] : lc.terms) {
            append_u32be(buf, wire);
            append_u64be(buf, coeff.v);
        }
    };
    for (const Constraint& c : constraints_) {
        put_lc(c.a);
        put_lc(c.b);
        put_lc(c.c);
    }
    return sha256(buf);
}

QapDomain::QapDomain(size_t m) : m_(m) {
    if (m == 0) throw std::invalid_argument("QapDomain: empty constraint system");
    // Z(X) = prod_{k=1..m} (X - k), built incrementally.
    z_ = {Fq(1)};
    for (size_t k = 1; k <= m; ++k) {
        pg::Poly next(z_.size() + 1);
        Fq neg_k = -Fq(k);
        for (size_t i = 0; i < z_.size(); ++i) {
            next[i] = next[i] + z_[i] * neg_k;
            next[i + 1] = next[i + 1] + z_[i];
        }
        z_ = std::move(next);
    }
    // Z'(k) = (-1)^(m-k) * (k-1)! * (m-k)! on the 1..m grid.
    std::vector<Fq> fact(m);
    fact[0] = Fq(1);
    for (size_t i = 1; i < m; ++i) fact[i] = fact[i - 1] * Fq(i);
    zprime_inv_.resize(m);
    for (size_t k = 1; k <= m; ++k) {
        Fq zp = fact[k - 1] * fact[m - k];
        if ((m - k) % 2 == 1) zp = -zp;
        zprime_inv_[k - 1] = pg::fq_inv(zp);
    }
}

pg::Poly QapDomain::interpolate(const std::vector<Fq>& values) const {
    if (values.size() != m_) throw std::invalid_argument("interpolate: wrong value count");
    pg::Poly acc(m_);
    // Z/(X-k) by synthetic division, accumulated with weight v_k / Z'(k).
    std::vector<Fq> quot(m_);
    for (size_t k = 1; k <= m_; ++k) {
        Fq w = values[k - 1] * zprime_inv_[k - 1];
        if (w.v == 0) continue;
        Fq kf(k);
        Fq carry = z_[m_];  // monic leading coefficient
        for (size_t i = m_; i-- > 0;) {
            quot[i] = carry;
            carry = z_[i] + kf * carry;
        }
        for (size_t i = 0; i < m_; ++i) acc[i] = acc[i] + w * quot[i];
    }
    return pg::poly_trim(std::move(acc));
}

std::vector<Fq> QapDomain::lagrange_at(Fq x) const {
    Fq zx = vanishing_at(x);
    if (zx.v == 0) throw std::invalid_argument("lagrange_at: x lies on the domain");
    std::vector<Fq> out(m_);
    for (size_t k = 1; k <= m_; ++k) {
        out[k - 1] = zx * pg::fq_inv(x - Fq(k)) * zprime_inv_[k - 1];
    }
    return out;
}

SnarkKeys snark_setup(const R1CSystem& cs, Rng& rng) {
    const size_t m = cs.constraints().size();
    QapDomain domain(m);

    Fq tau, rho_a, rho_b;
    do {
        tau = pg::fq_random_nonzero(rng);
    } while (domain.vanishing_at(tau).v == 0);
    rho_a = pg::fq_random_nonzero(rng);
    rho_b = pg::fq_random_nonzero(rng);

    std::vector<Fq> lag = domain.lagrange_at(tau);

    // Per-wire evaluations A_i(tau), B_i(tau), C_i(tau).
    std::vector<Fq> av(cs.num_wires()), bv(cs.num_wires()), cv(cs.num_wires());
    const auto& constraints = cs.constraints();
    for (size_t k = 0; k < m; ++k) {
        Fq lk = lag[k];
        for (const auto& [wire, coeff] : constraints[k].a.terms) av[wire] = av[wire] + coeff * lk;
        for (const auto& [wire, coeff] : constraints[k].b.terms) bv[wire] = bv[wire] + coeff * lk;
        for (const auto& [wire, coeff] : constraints[k].c.terms) cv[wire] = cv[wire] + coeff * lk;
    }

    SnarkKeys keys;
    ProvingKey& pk = keys.pk;
    VerificationKey& vk = keys.vk;
    pk.circuit = vk.circuit = cs.digest();
    pk.num_wires = cs.num_wires();
    pk.num_public = vk.num_public = cs.num_public();
    pk.num_constraints = static_cast<uint32_t>(m);

    Fq rho_ab = rho_a * rho_b;
    const uint32_t n_priv = cs.num_wires() - cs.num_public() - 1;
    pk.a_priv.reserve(n_priv);
    pk.b_priv.reserve(n_priv);
    pk.c_priv.reserve(n_priv);
    for (uint32_t i = cs.num_public() + 1; i < cs.num_wires(); ++i) {
        pk.a_priv.push_back(av[i] * rho_a);
        pk.b_priv.push_back(bv[i] * rho_b);
        pk.c_priv.push_back(cv[i] * rho_ab);
    }
    size_t deg_h = m >= 2 ? m - 2 : 0;
    pk.h_pows.reserve(deg_h + 1);
    Fq tp(1);
    for (size_t j = 0; j <= deg_h; ++j) {
        pk.h_pows.push_back(tp * rho_a);
        tp = tp * tau;
    }

    vk.vk_a.reserve(cs.num_public() + 1);
    vk.vk_b.reserve(cs.num_public() + 1);
    vk.vk_c.reserve(cs.num_public() + 1);
    for (uint32_t i = 0; i <= cs.num_public(); ++i) {
        vk.vk_a.push_back(av[i] * rho_a);
        vk.vk_b.push_back(bv[i] * rho_b);
        vk.vk_c.push_back(cv[i] * rho_ab);
    }
    vk.vk_z = domain.vanishing_at(tau) * rho_b;
    // tau, rho_a, rho_b go out of scope here; no key field retains them.
    return keys;
}

SnarkProof snark_prove(const ProvingKey& pk, const ProverContext& ctx,
                       const std::vector<Fq>& assignment) {
    const R1CSystem& cs = ctx.cs;
    if (pk.circuit != cs.digest()) {
        throw std::invalid_argument("snark_prove: key was built for a different circuit");
    }
    long bad = cs.first_violation(assignment);
    if (bad >= 0) {
        throw WitnessInvalid("snark_prove: assignment violates constraint " +
                             std::to_string(bad));
    }

    const size_t m = cs.constraints().size();
    std::vector<Fq> va(m), vb(m), vc(m);
    for (size_t k = 0; k < m; ++k) {
        const Constraint& c = cs.constraints()[k];
        va[k] = c.a.eval(assignment);
        vb[k] = c.b.eval(assignment);
        vc[k] = c.c.eval(assignment);
    }
    pg::Poly pa = ctx.domain.interpolate(va);
    pg::Poly pb = ctx.domain.interpolate(vb);
    pg::Poly pc = ctx.domain.interpolate(vc);
    pg::Poly num = pg::poly_sub(pg::poly_mul(pa, pb), pc);
    pg::Poly h = pg::poly_divide_exact(num, ctx.domain.vanishing());

    Fq ea, eb, ec, eh;
    for (uint32_t i = cs.num_public() + 1; i < cs.num_wires(); ++i) {
        uint32_t j = i - cs.num_public() - 1;
        ea = ea + assignment[i] * pk.a_priv[j];
        eb = eb + assignment[i] * pk.b_priv[j];
        ec = ec + assignment[i] * pk.c_priv[j];
    }
    if (h.size() > pk.h_pows.size()) {
        throw std::logic_error("snark_prove: quotient degree exceeds key");
    }
    for (size_t j = 0; j < h.size(); ++j) eh = eh + h[j] * pk.h_pows[j];

    return SnarkProof{g1(ea), g2(eb), g1(ec), g1(eh)};
}

bool snark_verify(const VerificationKey& vk, const std::vector<Fq>& public_inputs,
                  const SnarkProof& proof) {
    if (public_inputs.size() != vk.num_public) return false;
    if (proof.a.tag != pg::GroupTag::G1 || proof.b.tag != pg::GroupTag::G2 ||
        proof.c.tag != pg::GroupTag::G1 || proof.h.tag != pg::GroupTag::G1) {
        return false;
    }
    // Public shares of A, B, C rebuilt from the statement.
    Fq vka = vk.vk_a[0], vkb = vk.vk_b[0], vkc = vk.vk_c[0];
    for (size_t i = 0; i < public_inputs.size(); ++i) {
        vka = vka + public_inputs[i] * vk.vk_a[i + 1];
        vkb = vkb + public_inputs[i] * vk.vk_b[i + 1];
        vkc = vkc + public_inputs[i] * vk.vk_c[i + 1];
    }
    PairElem lhs = pg::pair(pg::pg_add(g1(vka), proof.a), pg::pg_add(g2(vkb), proof.b));
    PairElem rhs = pg::pg_add(pg::pair(proof.h, g2(vk.vk_z)),
                              pg::pair(pg::pg_add(g1(vkc), proof.c), pg::g2_gen()));
    return lhs == rhs;
}

// ---- encodings ------------------------------------------------------------

static void put_exp32(uint8_t* out, Fq e) {
    std::memset(out, 0, 24);
    for (int i = 0; i < 8; ++i) out[24 + i] = static_cast<uint8_t>(e.v >> (8 * (7 - i)));
}

static std::optional<Fq> get_exp32(const uint8_t* in) {
    for (int i = 0; i < 24; ++i) {
        if (in[i] != 0) return std::nullopt;
    }
    uint64_t v = read_u64be(in + 24);
    if (v >= pg::kOrder) return std::nullopt;
    return Fq::raw(v);
}

std::array<uint8_t, 128> snark_proof_to_bytes(const SnarkProof& p) {
    std::array<uint8_t, 128> out{};
    put_exp32(out.data(), p.a.exp);
    put_exp32(out.data() + 32, p.b.exp);
    put_exp32(out.data() + 64, p.c.exp);
    put_exp32(out.data() + 96, p.h.exp);
    return out;
}

std::optional<SnarkProof> snark_proof_from_bytes(const uint8_t* b128) {
    auto a = get_exp32(b128);
    auto b = get_exp32(b128 + 32);
    auto c = get_exp32(b128 + 64);
    auto h = get_exp32(b128 + 96);
    if (!a || !b || !c || !h) return std::nullopt;
    return SnarkProof{g1(*a), g2(*b), g1(*c), g1(*h)};
}

static constexpr char kPkMagic[] = "ZAPSPK1";
static constexpr char kVkMagic[] = "ZAPSVK1";

namespace {

class Reader {
public:
    Reader(const Bytes& data, const char* what) : data_(data), what_(what) {}

    void expect_magic(const char* magic) {
        need(7);
        if (std::memcmp(data_.data() + pos_, magic, 7) != 0) {
            throw std::runtime_error(std::string(what_) + ": bad magic header");
        }
        pos_ += 7;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = read_u32be(data_.data() + pos_);
        pos_ += 4;
        return v;
    }
    Fq exp() {
        need(8);
        uint64_t v = read_u64be(data_.data() + pos_);
        pos_ += 8;
        if (v >= pg::kOrder) {
            throw std::runtime_error(std::string(what_) + ": non-canonical exponent");
        }
        return Fq::raw(v);
    }
    Digest32 digest() {
        need(32);
        Digest32 d;
        std::memcpy(d.data(), data_.data() + pos_, 32);
        pos_ += 32;
        return d;
    }
    std::vector<Fq> exps(size_t n) {
        std::vector<Fq> out;
        out.reserve(n);
        for (size_t i = 0; i < n; ++i) out.push_back(exp());
        return out;
    }
    void finish() {
        if (pos_ != data_.size()) {
            throw std::runtime_error(std::string(what_) + ": trailing bytes");
        }
    }

private:
    void need(size_t n) {
        if (pos_ + n > data_.size()) {
            throw std::runtime_error(std::string(what_) + ": truncated");
        }
    }
    const Bytes& data_;
    const char* what_;
    size_t pos_ = 0;
};

void put_exps(Bytes& out, const std::vector<Fq>& v) {
    for (Fq e : v) append_u64be(out, e.v);
}

}  // namespace

Bytes serialize_pk(const ProvingKey& pk) {
    Bytes out;
    append(out, std::string_view(kPkMagic));
    append(out, pk.circuit);
    append_u32be(out, pk.num_wires);
    append_u32be(out, pk.num_public);
    append_u32be(out, pk.num_constraints);
    append_u32be(out, static_cast<uint32_t>(pk.h_pows.size()));
    put_exps(out, pk.a_priv);
    put_exps(out, pk.b_priv);
    put_exps(out, pk.c_priv);
    put_exps(out, pk.h_pows);
    return out;
}

Bytes serialize_vk(const VerificationKey& vk) {
    Bytes out;
    append(out, std::string_view(kVkMagic));
    append(out, vk.circuit);
    append_u32be(out, vk.num_public);
    put_exps(out, vk.vk_a);
    put_exps(out, vk.vk_b);
    put_exps(out, vk.vk_c);
    append_u64be(out, vk.vk_z.v);
    return out;
}

ProvingKey parse_pk(const Bytes& data) {
    Reader r(data, "proving key");
    r.expect_magic(kPkMagic);
    ProvingKey pk;
    pk.circuit = r.digest();
    pk.num_wires = r.u32();
    pk.num_public = r.u32();
    pk.num_constraints = r.u32();
    uint32_t n_h = r.u32();
    if (pk.num_public + 1 > pk.num_wires) {
        throw std::runtime_error("proving key: inconsistent wire counts");
    }
    const uint32_t n_priv = pk.num_wires - pk.num_public - 1;
    pk.a_priv = r.exps(n_priv);
    pk.b_priv = r.exps(n_priv);
    pk.c_priv = r.exps(n_priv);
    pk.h_pows = r.exps(n_h);
    r.finish();
    return pk;
}

VerificationKey parse_vk(const Bytes& data) {
    Reader r(data, "verification key");
    r.expect_magic(kVkMagic);
    VerificationKey vk;
    vk.circuit = r.digest();
    vk.num_public = r.u32();
    vk.vk_a = r.exps(vk.num_public + 1);
    vk.vk_b = r.exps(vk.num_public + 1);
    vk.vk_c = r.exps(vk.num_public + 1);
    vk.vk_z = r.exp();
    r.finish();
    return vk;
}

static void write_file(const std::string& path, const Bytes& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

static Bytes read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return data;
}

void save_pk(const std::string& path, const ProvingKey& pk) { write_file(path, serialize_pk(pk)); }
void save_vk(const std::string& path, const VerificationKey& vk) { write_file(path, serialize_vk(vk)); }
ProvingKey load_pk(const std::string& path) { return parse_pk(read_file(path)); }
VerificationKey load_vk(const std::string& path) { return parse_vk(read_file(path)); }

}  // namespace zaps::snark
