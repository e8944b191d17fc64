#include "zaps/backend.hpp"

namespace zaps::snark {

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Schnorr:
            return "schnorr";
        case Backend::Qap:
            return "qap";
    }
    return "?";
}

std::optional<Backend> backend_by_name(std::string_view name) {
    if (name == "schnorr") return Backend::Schnorr;
    if (name == "qap") return Backend::Qap;
    return std::nullopt;
}

Bytes Statement::context(const Curve& curve) const {
    Bytes buf;
    append(buf, std::string_view("ZAPS-statement"));
    append(buf, curve.encode_full(commitment.point));
    append(buf, curve.encode_full(prover_pub));
    append_u32be(buf, (uint32_t(fence.x_min) << 16) | fence.x_max);
    append_u32be(buf, (uint32_t(fence.y_min) << 16) | fence.y_max);
    append_u64be(buf, acc_out.v);
    append_u32be(buf, n_waypoints);
    return buf;
}

std::vector<Fq> Statement::public_inputs() const {
    return flight_public_inputs(fence, acc_out);
}

ProofSystem::ProofSystem(const Curve& curve, uint64_t setup_seed)
    : curve_(curve), setup_seed_(setup_seed) {}

const ProofSystem::ClassMaterial& ProofSystem::material(size_t n_waypoints) {
    auto it = classes_.find(n_waypoints);
    if (it == classes_.end()) {
        Rng rng(Rng::derive_seed(setup_seed_, "setup/" + std::to_string(n_waypoints)));
        auto mat = std::make_unique<ClassMaterial>(compile_flight_circuit(n_waypoints), rng);
        it = classes_.emplace(n_waypoints, std::move(mat)).first;
    }
    return *it->second;
}

Statement ProofSystem::make_statement(const FlightPath& path, const Geofence& fence,
                                      const Scalar& r, const CurvePoint& prover_pub) const {
    validate_geofence(fence);
    Statement st;
    st.commitment = commit(curve_, path, r);
    st.prover_pub = prover_pub;
    st.fence = fence;
    st.acc_out = accumulator_eval(path);
    st.n_waypoints = static_cast<uint32_t>(path.points.size());
    return st;
}

ProofEnvelope ProofSystem::prove(Backend backend, const Statement& statement,
                                 const PedersenOpening& opening, Rng& rng) {
    if (opening.path.points.size() != statement.n_waypoints) {
        throw WitnessInvalid("prove: path length does not match statement");
    }
    if (!(commit(curve_, opening.path, opening.r).point == statement.commitment.point)) {
        throw WitnessInvalid("prove: opening does not match committed statement");
    }
    ProofEnvelope env;
    switch (backend) {
        case Backend::Schnorr: {
            Scalar s = opening_scalar(curve_, opening);
            env.bytes = schnorr_prove(curve_, statement.commitment, s,
                                      statement.context(curve_), rng);
            return env;
        }
        case Backend::Qap: {
            const ClassMaterial& mat = material(statement.n_waypoints);
            if (!(accumulator_eval(opening.path) == statement.acc_out)) {
                throw WitnessInvalid("prove: accumulator output mismatch");
            }
            auto assignment = flight_assignment(mat.circuit, opening.path, statement.fence);
            SnarkProof p = snark_prove(mat.keys.pk, mat.prover, assignment);
            env.bytes = snark_proof_to_bytes(p);
            return env;
        }
    }
    throw std::invalid_argument("prove: unknown backend");
}

bool ProofSystem::verify(Backend backend, const Statement& statement,
                         const ProofEnvelope& proof) {
    switch (backend) {
        case Backend::Schnorr:
            return schnorr_verify(curve_, statement.commitment, proof.bytes.data(),
                                  statement.context(curve_));
        case Backend::Qap: {
            if (!valid_waypoint_count(statement.n_waypoints)) return false;
            auto parsed = snark_proof_from_bytes(proof.bytes.data());
            if (!parsed) return false;
            const ClassMaterial& mat = material(statement.n_waypoints);
            return snark_verify(mat.keys.vk, statement.public_inputs(), *parsed);
        }
    }
    return false;
}

}  // namespace zaps::snark
