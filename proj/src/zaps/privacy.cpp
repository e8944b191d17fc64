#include "zaps/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zaps/kex.hpp"
#include "zaps/stats.hpp"

namespace zaps::privacy {

using snark::Backend;
using snark::FlightPath;
using snark::Geofence;
using snark::PedersenOpening;
using snark::ProofSystem;
using snark::Statement;

const char* mode_name(Mode m) { return m == Mode::Protected ? "protected" : "baseline"; }

std::optional<Mode> mode_by_name(std::string_view name) {
    if (name == "protected") return Mode::Protected;
    if (name == "baseline") return Mode::Baseline;
    return std::nullopt;
}

// ---- trace generation ------------------------------------------------------

namespace {

constexpr uint32_t kRouteClasses[4] = {5, 8, 10, 15};
// Per-waypoint extension: one 128-byte proof plus its 32-byte commitment.
constexpr uint32_t kPerWaypoint = 128 + 32;
// Protected mode pads the burst to the largest route class so its size
// carries no route information.
constexpr uint32_t kPaddedBurst = 15 * kPerWaypoint;

struct ClassMaterial {
    Statement st;
    PedersenOpening opening;
};

// One committed route per class, shared by the corpus: the proof
// distribution is what matters here, and honest envelopes are independent
// of which statement they prove (fresh nonce per proof).
ClassMaterial make_class_material(ProofSystem& ps, uint32_t n, Rng& rng) {
    Geofence fence{1000, 3000, 1000, 3000};
    FlightPath path;
    for (uint32_t i = 0; i < n; ++i) {
        path.points.push_back({static_cast<uint16_t>(1000 + rng.below(2001)),
                               static_cast<uint16_t>(1000 + rng.below(2001))});
    }
    ec::Scalar r = ps.curve().random_nonzero_scalar(rng);
    kex::KeyPair prover = kex::gen_keypair(ps.curve(), rng);
    ClassMaterial m{ps.make_statement(path, fence, r, prover.pub), PedersenOpening{r, path}};
    return m;
}

}  // namespace

std::vector<SessionTrace> gen_traces(Mode mode, uint32_t n_uavs, uint32_t sessions_per_uav,
                                     uint64_t seed) {
    if (n_uavs < 2 || sessions_per_uav < 2) {
        throw std::invalid_argument("gen_traces: counts must be >= 2");
    }
    Rng root(seed);
    Rng setup_rng = root.child("setup");
    ProofSystem ps(ec::curve_by_id(ec::CurveId::Secp256k1), setup_rng.u64());
    std::map<uint32_t, ClassMaterial> classes;
    if (mode == Mode::Protected) {
        Rng mat_rng = root.child("material");
        for (uint32_t n : kRouteClasses) classes.emplace(n, make_class_material(ps, n, mat_rng));
    }

    std::vector<SessionTrace> out;
    out.reserve(size_t(n_uavs) * sessions_per_uav);
    for (uint32_t u = 0; u < n_uavs; ++u) {
        Rng urng = root.child("uav-" + std::to_string(u));
        // Baseline leaks: a stable per-device beacon size plus stable
        // per-device timing offset and jitter amplitude, all constant across
        // the device's sessions. Protected sessions draw everything fresh.
        uint32_t beacon = 512 + 128 * uint32_t(urng.below(100));
        uint32_t beacon_reps = 1 + uint32_t(urng.below(3));
        double base_gap = urng.uniform(15.0, 45.0);
        double jitter = urng.uniform(0.5, 3.0);
        for (uint32_t s = 0; s < sessions_per_uav; ++s) {
            Rng srng = urng.child("session-" + std::to_string(s));
            SessionTrace tr;
            tr.uav = u;
            tr.mode = mode;
            tr.route_class = kRouteClasses[srng.below(4)];

            double t = 0;
            auto step = [&] {
                return mode == Mode::Protected ? srng.uniform(15.0, 45.0)
                                               : base_gap + srng.uniform(-jitter, jitter);
            };
            if (mode == Mode::Baseline) {
                for (uint32_t rep = 0; rep < beacon_reps; ++rep) {
                    if (!tr.msgs.empty()) t += step();
                    tr.msgs.push_back({beacon, t});
                }
            }
            for (size_t i = 0; i < 8; ++i) {
                if (!tr.msgs.empty()) t += step();
                tr.msgs.push_back({uint32_t(wire::kMsgSize[i]), t});
            }
            t += step();
            uint32_t burst = mode == Mode::Protected ? kPaddedBurst
                                                     : tr.route_class * kPerWaypoint;
            tr.msgs.push_back({burst, t});

            // Three proof blobs per session (route, authorization,
            // countersign in the live protocol).
            for (int p = 0; p < 3; ++p) {
                if (mode == Mode::Protected) {
                    const ClassMaterial& m = classes.at(tr.route_class);
                    auto env = ps.prove(Backend::Schnorr, m.st, m.opening, srng);
                    tr.proofs.emplace_back(env.bytes.begin(), env.bytes.end());
                } else {
                    // Ablation: blob length tracks the route class.
                    tr.proofs.push_back(srng.bytes(64 + 16 * tr.route_class));
                }
            }
            out.push_back(std::move(tr));
        }
    }
    return out;
}

// ---- features --------------------------------------------------------------

std::vector<double> session_features(const SessionTrace& t) {
    std::vector<double> sizes, gaps;
    for (const MsgMeta& m : t.msgs) sizes.push_back(double(m.size));
    for (size_t i = 1; i < t.msgs.size(); ++i) gaps.push_back(t.msgs[i].t_ms - t.msgs[i - 1].t_ms);
    double total = 0;
    for (double s : sizes) total += s;
    auto mean_of = [](const std::vector<double>& xs) {
        return xs.empty() ? 0.0 : stats::mean(xs);
    };
    auto var_of = [](const std::vector<double>& xs) {
        return xs.size() < 2 ? 0.0 : stats::variance(xs);
    };
    return {double(t.msgs.size()), total,         mean_of(gaps),
            var_of(gaps),          mean_of(sizes), var_of(sizes)};
}

std::vector<double> proof_features(const Bytes& proof) {
    std::vector<double> f(17, 0.0);
    std::array<uint32_t, 256> counts{};
    for (uint8_t b : proof) {
        f[b >> 4] += 1.0;  // raw counts: total reveals the length
        counts[b]++;
    }
    double h = 0;
    if (!proof.empty()) {
        for (uint32_t c : counts) {
            if (c == 0) continue;
            double p = double(c) / double(proof.size());
            h -= p * std::log2(p);
        }
    }
    f[16] = h;
    return f;
}

void standardize(std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return;
    size_t d = rows[0].size();
    for (size_t j = 0; j < d; ++j) {
        std::vector<double> col;
        col.reserve(rows.size());
        for (auto& r : rows) col.push_back(r.at(j));
        double m = stats::mean(col);
        double sd = stats::stdev(col);
        for (auto& r : rows) r[j] = sd > 0 ? (r[j] - m) / sd : 0.0;
    }
}

// ---- AUC -------------------------------------------------------------------

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::invalid_argument("auc: size mismatch");
    }
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: one-class input");

    // Average ranks over tie groups, then the rank-sum statistic.
    std::vector<size_t> idx(scores.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        double r = (double(i + 1) + double(j + 1)) / 2.0;  // 1-based mean rank
        for (size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    double rank_sum_pos = 0;
    for (size_t k = 0; k < labels.size(); ++k) {
        if (labels[k]) rank_sum_pos += rank[k];
    }
    double u = rank_sum_pos - double(n_pos) * double(n_pos + 1) / 2.0;
    return u / (double(n_pos) * double(n_neg));
}

// ---- k-means ---------------------------------------------------------------

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

namespace {

struct KmRun {
    std::vector<uint32_t> assign;
    double sse = 0;
};

KmRun kmeans_once(const std::vector<std::vector<double>>& rows, uint32_t k, Rng& rng) {
    size_t n = rows.size();

    // k-means++: first centroid uniform, the rest d^2-weighted.
    std::vector<std::vector<double>> centers;
    centers.push_back(rows[rng.below(n)]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0;
        for (size_t i = 0; i < n; ++i) {
            double best = sqdist(rows[i], centers[0]);
            for (size_t c = 1; c < centers.size(); ++c) {
                best = std::min(best, sqdist(rows[i], centers[c]));
            }
            d2[i] = best;
            total += best;
        }
        if (total <= 0) {
            centers.push_back(rows[rng.below(n)]);  // all points on centroids
            continue;
        }
        double pick = rng.uniform01() * total;
        size_t chosen = n - 1;
        double acc = 0;
        for (size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (pick <= acc) {
                chosen = i;
                break;
            }
        }
        centers.push_back(rows[chosen]);
    }

    std::vector<uint32_t> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        for (size_t i = 0; i < n; ++i) {
            double best = sqdist(rows[i], centers[0]);
            uint32_t who = 0;
            for (uint32_t c = 1; c < k; ++c) {
                double d = sqdist(rows[i], centers[c]);
                if (d < best) {
                    best = d;
                    who = c;
                }
            }
            assign[i] = who;
        }
        std::vector<std::vector<double>> sum(k, std::vector<double>(rows[0].size(), 0.0));
        std::vector<size_t> cnt(k, 0);
        for (size_t i = 0; i < n; ++i) {
            cnt[assign[i]]++;
            for (size_t j = 0; j < rows[i].size(); ++j) sum[assign[i]][j] += rows[i][j];
        }
        for (uint32_t c = 0; c < k; ++c) {
            if (cnt[c] == 0) {
                // Re-seed an emptied cluster on the globally worst-fit point.
                size_t far = 0;
                double worst = -1;
                for (size_t i = 0; i < n; ++i) {
                    double d = sqdist(rows[i], centers[assign[i]]);
                    if (d > worst) {
                        worst = d;
                        far = i;
                    }
                }
                centers[c] = rows[far];
                continue;
            }
            for (size_t j = 0; j < sum[c].size(); ++j) centers[c][j] = sum[c][j] / double(cnt[c]);
        }
    }
    KmRun run;
    run.assign = std::move(assign);
    for (size_t i = 0; i < n; ++i) run.sse += sqdist(rows[i], centers[run.assign[i]]);
    return run;
}

}  // namespace

std::vector<uint32_t> kmeans(const std::vector<std::vector<double>>& rows, uint32_t k,
                             uint64_t seed) {
    if (k == 0 || rows.size() < k) throw std::invalid_argument("kmeans: k out of range");
    // Ten seeded restarts, keep the lowest within-cluster sum of squares —
    // one k-means++ start routinely splits one tight cluster and merges two.
    Rng rng(seed);
    KmRun best;
    for (int restart = 0; restart < 10; ++restart) {
        KmRun run = kmeans_once(rows, k, rng);
        if (restart == 0 || run.sse < best.sse) best = std::move(run);
    }
    return best.assign;
}

double purity(const std::vector<uint32_t>& assign, const std::vector<uint32_t>& labels) {
    if (assign.size() != labels.size() || assign.empty()) {
        throw std::invalid_argument("purity: size mismatch");
    }
    std::map<uint32_t, std::map<uint32_t, size_t>> tab;  // cluster -> label -> n
    for (size_t i = 0; i < assign.size(); ++i) tab[assign[i]][labels[i]]++;
    size_t hit = 0;
    for (auto& [c, hist] : tab) {
        size_t best = 0;
        for (auto& [l, n] : hist) best = std::max(best, n);
        hit += best;
    }
    return double(hit) / double(assign.size());
}

// ---- logistic model --------------------------------------------------------

namespace {

struct Logistic {
    std::vector<double> w;
    double b = 0;

    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

    double score(const std::vector<double>& x) const {
        double z = b;
        for (size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
        return z;  // monotone in probability; enough for ranking
    }

    // Full-batch gradient ascent on the log-likelihood, fixed schedule.
    void fit(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
        w.assign(xs.empty() ? 0 : xs[0].size(), 0.0);
        b = 0;
        const double rate = 0.1;
        for (int epoch = 0; epoch < 500; ++epoch) {
            std::vector<double> gw(w.size(), 0.0);
            double gb = 0;
            for (size_t i = 0; i < xs.size(); ++i) {
                double err = double(ys[i]) - sigmoid(score(xs[i]));
                for (size_t j = 0; j < w.size(); ++j) gw[j] += err * xs[i][j];
                gb += err;
            }
            double inv = 1.0 / double(std::max<size_t>(1, xs.size()));
            for (size_t j = 0; j < w.size(); ++j) w[j] += rate * gw[j] * inv;
            b += rate * gb * inv;
        }
    }
};

// Mean per-fold AUC of a 5-fold cross-validation; folds that end up
// one-class (possible only on tiny inputs) are skipped.
double cv_auc(std::vector<std::vector<double>> xs, std::vector<int> ys, Rng& rng) {
    standardize(xs);
    std::vector<size_t> order(xs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    const int folds = 5;
    std::vector<double> fold_auc;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::vector<double>> train_x, test_x;
        std::vector<int> train_y, test_y;
        for (size_t i = 0; i < order.size(); ++i) {
            bool test = int(i % folds) == f;
            (test ? test_x : train_x).push_back(xs[order[i]]);
            (test ? test_y : train_y).push_back(ys[order[i]]);
        }
        auto has_both = [](const std::vector<int>& v) {
            bool p = false, n = false;
            for (int y : v) (y ? p : n) = true;
            return p && n;
        };
        if (!has_both(train_y) || !has_both(test_y)) continue;
        Logistic model;
        model.fit(train_x, train_y);
        std::vector<double> scores;
        scores.reserve(test_x.size());
        for (auto& x : test_x) scores.push_back(model.score(x));
        fold_auc.push_back(auc(scores, test_y));
    }
    if (fold_auc.empty()) throw std::invalid_argument("cv_auc: degenerate folds");
    return stats::mean(fold_auc);
}

// A distinguisher is free to negate its score, so advantage is sign-free;
// reports fold the AUC about 0.5 (attacker-favoring, conservative for the
// privacy claim).
double folded(double a) { return 0.5 + std::fabs(a - 0.5); }

// Random-score control averaged over repeated draws: one draw's rank AUC
// has sd ~ 0.04 at these sample sizes, the average pins the chance level.
double noise_control(const std::vector<int>& labels, Rng& rng) {
    double sum = 0;
    const int reps = 25;
    std::vector<double> noise(labels.size());
    for (int rep = 0; rep < reps; ++rep) {
        for (double& x : noise) x = rng.uniform01();
        sum += auc(noise, labels);
    }
    return sum / reps;
}

}  // namespace

// ---- attacks ---------------------------------------------------------------

AttackReport cluster_attack(const std::vector<SessionTrace>& traces, uint32_t k, uint64_t seed) {
    if (traces.empty() || k == 0 || k > traces.size()) {
        throw std::invalid_argument("cluster_attack: k out of range");
    }
    std::vector<std::vector<double>> rows;
    std::vector<uint32_t> labels;
    for (const SessionTrace& t : traces) {
        rows.push_back(session_features(t));
        labels.push_back(t.uav);
    }
    standardize(rows);
    Rng rng(seed);
    Rng km_rng = rng.child("kmeans");
    std::vector<uint32_t> assign = kmeans(rows, k, km_rng.u64());
    double raw = purity(assign, labels);

    // Empirical chance level: same clustering, shuffled labels.
    Rng sh_rng = rng.child("shuffle");
    double chance_sum = 0;
    std::vector<uint32_t> shuffled = labels;
    for (int rep = 0; rep < 100; ++rep) {
        for (size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[sh_rng.below(i)]);
        }
        chance_sum += purity(assign, shuffled);
    }
    double chance = chance_sum / 100.0;

    AttackReport r;
    r.kind = "clustering";
    r.metric = "adjusted-purity";
    r.raw = raw;
    r.control = chance;
    r.value = chance < 1.0 ? (raw - chance) / (1.0 - chance) : 0.0;
    r.params = "k=" + std::to_string(k) + ",n=" + std::to_string(traces.size());
    r.seed = seed;
    return r;
}

AttackReport linkability_attack(const std::vector<SessionTrace>& traces, uint32_t pairs_per_class,
                                uint64_t seed) {
    if (pairs_per_class == 0) throw std::invalid_argument("linkability: no pairs");
    std::map<uint32_t, std::vector<size_t>> by_uav;
    for (size_t i = 0; i < traces.size(); ++i) by_uav[traces[i].uav].push_back(i);
    if (by_uav.size() < 2) throw std::invalid_argument("linkability: need >= 2 devices");
    for (auto& [u, idx] : by_uav) {
        if (idx.size() < 2) throw std::invalid_argument("linkability: need >= 2 sessions each");
    }

    std::vector<std::vector<double>> feats;
    for (const SessionTrace& t : traces) feats.push_back(session_features(t));

    Rng rng(seed);
    Rng pair_rng = rng.child("pairs");
    std::vector<uint32_t> uavs;
    for (auto& [u, idx] : by_uav) uavs.push_back(u);

    auto diff_vec = [&](size_t a, size_t b) {
        std::vector<double> d(feats[a].size());
        for (size_t j = 0; j < d.size(); ++j) d[j] = std::fabs(feats[a][j] - feats[b][j]);
        return d;
    };

    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (uint32_t p = 0; p < pairs_per_class; ++p) {
        // Same-device pair.
        const auto& idx = by_uav.at(uavs[pair_rng.below(uavs.size())]);
        size_t a = idx[pair_rng.below(idx.size())];
        size_t b = a;
        while (b == a) b = idx[pair_rng.below(idx.size())];
        xs.push_back(diff_vec(a, b));
        ys.push_back(1);
        // Different-device pair.
        uint32_t u1 = uavs[pair_rng.below(uavs.size())];
        uint32_t u2 = u1;
        while (u2 == u1) u2 = uavs[pair_rng.below(uavs.size())];
        const auto& i1 = by_uav.at(u1);
        const auto& i2 = by_uav.at(u2);
        xs.push_back(diff_vec(i1[pair_rng.below(i1.size())], i2[pair_rng.below(i2.size())]));
        ys.push_back(0);
    }

    Rng cv_rng = rng.child("cv");
    double mean_auc = cv_auc(xs, ys, cv_rng);

    // Random-score control over the same labels.
    Rng ctl_rng = rng.child("control");
    double control = noise_control(ys, ctl_rng);

    AttackReport r;
    r.kind = "linkability";
    r.metric = "AUC";
    r.raw = mean_auc;
    r.value = folded(mean_auc);
    r.control = control;
    r.params = "pairs=" + std::to_string(pairs_per_class) + "x2,n=" + std::to_string(traces.size());
    r.seed = seed;
    return r;
}

AttackReport proof_distinguishability(const std::vector<SessionTrace>& traces, uint64_t seed) {
    std::vector<std::vector<double>> xs;
    std::vector<uint32_t> classes;
    for (const SessionTrace& t : traces) {
        for (const Bytes& p : t.proofs) {
            xs.push_back(proof_features(p));
            classes.push_back(t.route_class);
        }
    }
    std::set<uint32_t> present(classes.begin(), classes.end());
    if (present.size() < 2) throw std::invalid_argument("proofdist: need >= 2 route classes");

    Rng rng(seed);
    std::vector<double> per_class;
    for (uint32_t c : present) {
        std::vector<int> ys;
        ys.reserve(classes.size());
        for (uint32_t l : classes) ys.push_back(l == c ? 1 : 0);
        Rng cv_rng = rng.child("cv-" + std::to_string(c));
        per_class.push_back(cv_auc(xs, ys, cv_rng));
    }
    double mean_auc = stats::mean(per_class);

    Rng ctl_rng = rng.child("control");
    std::vector<int> ys;
    uint32_t first = *present.begin();
    for (uint32_t l : classes) ys.push_back(l == first ? 1 : 0);
    double control = noise_control(ys, ctl_rng);

    AttackReport r;
    r.kind = "proofdist";
    r.metric = "AUC";
    r.raw = mean_auc;
    r.value = folded(mean_auc);
    r.control = control;
    r.params = "proofs=" + std::to_string(xs.size()) +
               ",classes=" + std::to_string(present.size());
    r.seed = seed;
    return r;
}

// ---- reporting -------------------------------------------------------------

std::string attack_csv_header() {
    return "kind,metric,value,raw,control,params,seed\r\n";
}

std::string attack_csv_row(const AttackReport& r) {
    std::ostringstream os;
    os << r.kind << ',' << r.metric << ',' << r.value << ',' << r.raw << ',' << r.control << ','
       << '"' << r.params << '"' << ',' << r.seed << "\r\n";
    return os.str();
}

std::string attack_json(const std::vector<AttackReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AttackReport& r : reports) {
        arr.push_back({{"kind", r.kind},
                       {"metric", r.metric},
                       {"value", r.value},
                       {"raw", r.raw},
                       {"control", r.control},
                       {"params", r.params},
                       {"seed", r.seed}});
    }
    return arr.dump(2);
}

}  // namespace zaps::privacy
