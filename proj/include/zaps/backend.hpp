#pragma once

#include <map>
#include <memory>

#include "zaps/circuit.hpp"
#include "zaps/schnorr.hpp"

namespace zaps::snark {

enum class Backend : uint8_t { Schnorr = 1, Qap = 2 };

const char* backend_name(Backend b);
std::optional<Backend> backend_by_name(std::string_view name);

// What a verifier holds about a prover's committed route: the Pedersen
// commitment, the fence, the accumulator output and the prover's public key.
// Registered with the session authority when the mission is filed; the
// route itself never appears.
struct Statement {
    PedersenCommitment commitment;
    CurvePoint prover_pub;
    Geofence fence;
    Fq acc_out;
    uint32_t n_waypoints = 0;

    // Canonical serialization, used as Fiat-Shamir context.
    Bytes context(const Curve& curve) const;
    std::vector<Fq> public_inputs() const;
};

// Fixed 128-byte proof blob; both backends use the same wire size.
struct ProofEnvelope {
    std::array<uint8_t, 128> bytes{};
    bool operator==(const ProofEnvelope&) const = default;
};

// Bundles the curve with per-route-class circuits and SNARK keys. Keys are
// generated lazily per class from a dedicated setup seed (modeling the
// offline distribution of proving/verification keys).
class ProofSystem {
public:
    ProofSystem(const Curve& curve, uint64_t setup_seed);

    const Curve& curve() const { return curve_; }

    // Commits to the path and assembles the statement a verifier will hold.
    Statement make_statement(const FlightPath& path, const Geofence& fence, const Scalar& r,
                             const CurvePoint& prover_pub) const;

    // Proves knowledge of the committed route (and, for the QAP backend,
    // fence containment of every waypoint). Throws WitnessInvalid when the
    // opening or path does not match the statement.
    ProofEnvelope prove(Backend backend, const Statement& statement,
                        const PedersenOpening& opening, Rng& rng);

    bool verify(Backend backend, const Statement& statement, const ProofEnvelope& proof);

    // Per-class access used by benches and key-file tooling.
    struct ClassMaterial {
        FlightCircuit circuit;
        ProverContext prover;
        SnarkKeys keys;

        ClassMaterial(FlightCircuit c, Rng& rng)
            : circuit(std::move(c)), prover(circuit.cs), keys(snark_setup(circuit.cs, rng)) {}
    };
    const ClassMaterial& material(size_t n_waypoints);

private:
    const Curve& curve_;
    uint64_t setup_seed_;
    std::map<size_t, std::unique_ptr<ClassMaterial>> classes_;
};

// ---- naming shims for the four textbook algorithm names -------------------

// Public parameters of the bilinear setting (fixed for this artifact).
struct PublicParams {
    uint64_t group_order;
    pg::PairElem g1, g2;
};

inline PublicParams setup() { return PublicParams{pg::kOrder, pg::g1_gen(), pg::g2_gen()}; }

inline SnarkKeys keygen(const R1CSystem& circuit, Rng& rng) { return snark_setup(circuit, rng); }

inline SnarkProof genproof(const ProvingKey& pk, const ProverContext& ctx,
                           const std::vector<Fq>& assignment) {
    return snark_prove(pk, ctx, assignment);
}

inline bool verproof(const VerificationKey& vk, const std::vector<Fq>& public_inputs,
                     const SnarkProof& proof) {
    return snark_verify(vk, public_inputs, proof);
}

}  // namespace zaps::snark
