#pragma once

#include <string>

#include "zaps/backend.hpp"
#include "zaps/rng.hpp"
#include "zaps/wire.hpp"

namespace zaps::privacy {

// Metadata-attack harness: generates labeled session traces in two modes and
// runs the three observer attacks (session clustering, pairwise linkability,
// proof distinguishability) with self-contained analytics — k-means, a
// gradient-descent logistic model, and rank-statistic AUC.

enum class Mode : uint8_t { Protected = 0, Baseline = 1 };

const char* mode_name(Mode m);
std::optional<Mode> mode_by_name(std::string_view name);

struct MsgMeta {
    uint32_t size = 0;  // payload bytes
    double t_ms = 0;    // virtual send time
};

// What a passive observer gets from one session, plus the ground-truth
// labels (never exposed to the attacker features).
struct SessionTrace {
    uint32_t uav = 0;
    uint32_t route_class = 0;  // waypoint count
    Mode mode = Mode::Protected;
    std::vector<MsgMeta> msgs;
    std::vector<Bytes> proofs;  // proof byte strings seen on the wire
};

// Deterministic per seed. Protected mode: fixed per-message sizes, the
// per-waypoint proof burst padded to the largest route class, fresh iid
// timing, real prover proofs. Baseline mode (protections off): the proof
// message grows with the route, a stable per-device beacon rides along,
// timing carries a stable per-device offset, and proof blobs are
// length-correlated with the route.
std::vector<SessionTrace> gen_traces(Mode mode, uint32_t n_uavs, uint32_t sessions_per_uav,
                                     uint64_t seed);

// Session metadata features: {message count, total bytes, mean and variance
// of inter-arrival gaps, mean and variance of sizes}.
std::vector<double> session_features(const SessionTrace& t);
// Proof features: 16-bin byte histogram (raw counts, so length leaks when it
// varies) plus byte-entropy in bits.
std::vector<double> proof_features(const Bytes& proof);

// Column-wise zero-mean unit-variance in place; constant columns become 0.
void standardize(std::vector<std::vector<double>>& rows);

// ---- analytics ------------------------------------------------------------

// Mann-Whitney rank AUC, ties counted half. Throws when a class is missing.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// k-means++ seeding, fixed 100 Lloyd iterations; an emptied cluster is
// re-seeded on the point farthest from its centroid. Returns assignments.
std::vector<uint32_t> kmeans(const std::vector<std::vector<double>>& rows, uint32_t k,
                             uint64_t seed);

// Mean over clusters' majority-class fractions, weighted by cluster size.
double purity(const std::vector<uint32_t>& assign, const std::vector<uint32_t>& labels);

// ---- attacks --------------------------------------------------------------

struct AttackReport {
    std::string kind;    // clustering | linkability | proofdist
    std::string metric;  // adjusted-purity | AUC
    double value = 0;    // headline number (chance-adjusted / folded)
    double raw = 0;      // unadjusted purity / unfolded mean AUC
    double control = 0;  // label-shuffle or random-score control
    std::string params;
    uint64_t seed = 0;
};

// k-means over session features; value = (purity - chance)/(1 - chance)
// where chance is the mean purity of 100 label shuffles. k must not exceed
// the trace count.
AttackReport cluster_attack(const std::vector<SessionTrace>& traces, uint32_t k, uint64_t seed);

// Balanced same-device / different-device session pairs, |difference|
// feature vectors, logistic model (full-batch GD, 500 epochs, rate 0.1)
// under 5-fold cross-validation; value = mean fold AUC folded about 0.5.
// Every device needs at least two sessions.
AttackReport linkability_attack(const std::vector<SessionTrace>& traces, uint32_t pairs_per_class,
                                uint64_t seed);

// One-vs-rest route-class classification of individual proofs with the same
// classifier/CV/AUC machinery; needs at least two route classes.
AttackReport proof_distinguishability(const std::vector<SessionTrace>& traces, uint64_t seed);

// ---- reporting ------------------------------------------------------------

std::string attack_csv_header();
std::string attack_csv_row(const AttackReport& r);
// Three-bar summary mirroring the metrics figure: one object per attack.
std::string attack_json(const std::vector<AttackReport>& reports);

}  // namespace zaps::privacy
