#pragma once

#include <optional>

#include "zaps/hash.hpp"
#include "zaps/pairing.hpp"

namespace zaps::snark {

using pg::Fq;

// Raised when a prover is asked to prove a statement its witness does not
// satisfy. Proving false statements silently is never an option.
struct WitnessInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---- rank-1 constraint system --------------------------------------------

// Sparse linear combination over wires. Wire 0 is the constant-one wire,
// wires 1..num_public are the public inputs, the rest are private.
struct LinComb {
    std::vector<std::pair<uint32_t, Fq>> terms;

    LinComb& add(uint32_t wire, Fq coeff) {
        if (coeff.v != 0) terms.emplace_back(wire, coeff);
        return *this;
    }
    Fq eval(const std::vector<Fq>& z) const;
};

struct Constraint {
    LinComb a, b, c;  // <a,z> * <b,z> = <c,z>
};

class R1CSystem {
public:
    // Wires 1..num_public are reserved for the statement.
    explicit R1CSystem(uint32_t num_public);

    uint32_t allocate_wire();
    void add_constraint(LinComb a, LinComb b, LinComb c);

    uint32_t num_wires() const { return num_wires_; }
    uint32_t num_public() const { return num_public_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    bool satisfied(const std::vector<Fq>& z) const;
    // Index of the first violated constraint, or -1.
    long first_violation(const std::vector<Fq>& z) const;

    // Digest of the canonical serialization; binds keys to the circuit.
    Digest32 digest() const;

private:
    uint32_t num_wires_;
    uint32_t num_public_;
    std::vector<Constraint> constraints_;
};

// ---- QAP interpolation domain --------------------------------------------

// Evaluation domain {1..m} for a system of m constraints, with the vanishing
// polynomial Z(X) = prod (X - k) and cached 1/Z'(k) for interpolation.
class QapDomain {
public:
    explicit QapDomain(size_t m);

    size_t size() const { return m_; }
    const pg::Poly& vanishing() const { return z_; }
    Fq vanishing_at(Fq x) const { return pg::poly_eval(z_, x); }

    // Degree < m polynomial taking values[k-1] at point k.
    pg::Poly interpolate(const std::vector<Fq>& values) const;

    // Lagrange basis evaluations L_k(x) for k = 1..m; x must avoid the
    // domain (Z(x) != 0).
    std::vector<Fq> lagrange_at(Fq x) const;

private:
    size_t m_;
    pg::Poly z_;
    std::vector<Fq> zprime_inv_;
};

// ---- proof system ---------------------------------------------------------

// Evaluation-key material: per-wire QAP polynomial evaluations at the setup
// point tau, blinded by rho_a / rho_b, stored as group exponents. The prover
// only ever sums over private wires; the public-wire shares live in the
// verification key so the verifier can rebuild them from the statement on
// all three polynomial families (an output wire may touch only the C side,
// and it must still bind).
struct ProvingKey {
    Digest32 circuit;
    uint32_t num_wires = 0;
    uint32_t num_public = 0;
    uint32_t num_constraints = 0;
    std::vector<Fq> a_priv;  // A_i(tau)*rho_a, private wires (G1)
    std::vector<Fq> b_priv;  // B_i(tau)*rho_b, private wires (G2)
    std::vector<Fq> c_priv;  // C_i(tau)*rho_a*rho_b, private wires (G1)
    std::vector<Fq> h_pows;  // tau^j*rho_a for j = 0..deg(H) (G1)
};

// Entry i covers wire i: index 0 the constant-one wire, 1..num_public the
// statement wires.
struct VerificationKey {
    Digest32 circuit;
    uint32_t num_public = 0;
    std::vector<Fq> vk_a;  // A_i(tau)*rho_a (G1)
    std::vector<Fq> vk_b;  // B_i(tau)*rho_b (G2)
    std::vector<Fq> vk_c;  // C_i(tau)*rho_a*rho_b (G1)
    Fq vk_z;               // Z(tau)*rho_b (G2)
};

struct SnarkKeys {
    ProvingKey pk;
    VerificationKey vk;
};

struct SnarkProof {
    pg::PairElem a;  // G1
    pg::PairElem b;  // G2
    pg::PairElem c;  // G1
    pg::PairElem h;  // G1
};

// Trusted setup: draws tau, rho_a, rho_b, emits both keys, forgets the trapdoor
// (the values never leave this call).
SnarkKeys snark_setup(const R1CSystem& cs, Rng& rng);

// Caches the domain for a circuit so repeated proofs skip rebuilding Z(X).
struct ProverContext {
    const R1CSystem& cs;
    QapDomain domain;

    explicit ProverContext(const R1CSystem& system)
        : cs(system), domain(system.constraints().size()) {}
};

// Checks the witness satisfies the system (WitnessInvalid otherwise and no
// proof is produced), interpolates A, B, C, divides out Z to get H, and
// emits the four blinded evaluations.
SnarkProof snark_prove(const ProvingKey& pk, const ProverContext& ctx,
                       const std::vector<Fq>& assignment);

// Pairing-identity check:
//   e(vkA + pi_a, vkB + pi_b) = e(pi_h, vk_z) * e(vkC + pi_c, g2)
// where each vkX is rebuilt from the statement:
//   vkX = vk_x[0] + sum_i s_i * vk_x[i].
bool snark_verify(const VerificationKey& vk, const std::vector<Fq>& public_inputs,
                  const SnarkProof& proof);

// ---- wire and file formats ------------------------------------------------

// 128-byte proof: each element as a 32-byte big-endian integer < q.
std::array<uint8_t, 128> snark_proof_to_bytes(const SnarkProof& p);
// Rejects non-canonical encodings (value >= q or nonzero high bytes).
std::optional<SnarkProof> snark_proof_from_bytes(const uint8_t* b128);

// Versioned binary key files, magic "ZAPSPK1" / "ZAPSVK1". Loaders reject
// bad magic, truncation, trailing bytes and non-canonical exponents.
Bytes serialize_pk(const ProvingKey& pk);
Bytes serialize_vk(const VerificationKey& vk);
ProvingKey parse_pk(const Bytes& data);
VerificationKey parse_vk(const Bytes& data);
void save_pk(const std::string& path, const ProvingKey& pk);
void save_vk(const std::string& path, const VerificationKey& vk);
ProvingKey load_pk(const std::string& path);
VerificationKey load_vk(const std::string& path);

}  // namespace zaps::snark
