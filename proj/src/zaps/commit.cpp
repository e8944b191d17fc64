#include "zaps/commit.hpp"

namespace zaps::snark {

bool valid_waypoint_count(size_t n) { return n == 5 || n == 8 || n == 10 || n == 15; }

void validate_geofence(const Geofence& f) {
    if (f.x_min > f.x_max || f.y_min > f.y_max) {
        throw std::invalid_argument("geofence: min exceeds max");
    }
}

Bytes encode_path(const FlightPath& path) {
    Bytes out;
    out.reserve(path.points.size() * 4);
    for (const Waypoint& w : path.points) {
        out.push_back(static_cast<uint8_t>(w.x >> 8));
        out.push_back(static_cast<uint8_t>(w.x));
        out.push_back(static_cast<uint8_t>(w.y >> 8));
        out.push_back(static_cast<uint8_t>(w.y));
    }
    return out;
}

static Scalar path_hash_scalar(const Curve& curve, const FlightPath& path, const Scalar& r) {
    Bytes buf = encode_path(path);
    auto rb = curve.encode_scalar(r);
    append(buf, rb);
    return curve.scalar_from_digest(sha256(buf));
}

PedersenCommitment commit(const Curve& curve, const FlightPath& path, const Scalar& r) {
    if (!valid_waypoint_count(path.points.size())) {
        throw std::invalid_argument("commit: unsupported waypoint count");
    }
    if (r.is_zero()) throw std::invalid_argument("commit: zero blinding scalar");
    Scalar h = path_hash_scalar(curve, path, r);
    CurvePoint c = curve.add(curve.mul_g(r), curve.mul_g(h));
    return PedersenCommitment{c};
}

Scalar opening_scalar(const Curve& curve, const PedersenOpening& opening) {
    if (opening.r.is_zero()) throw std::invalid_argument("opening_scalar: zero blinding scalar");
    return curve.s_add(opening.r, path_hash_scalar(curve, opening.path, opening.r));
}

pg::Fq accumulator_constant() {
    static const pg::Fq k = [] {
        Digest32 d = sha256(std::string_view("ZAPS-acc"));
        // Big-endian digest reduced mod q; fold 64-bit words Horner style.
        __uint128_t acc = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t w = read_u64be(d.data() + 8 * i);
            acc = ((acc << 32) % pg::kOrder << 32) % pg::kOrder;
            acc = (acc + w) % pg::kOrder;
        }
        return pg::Fq::raw(static_cast<uint64_t>(acc));
    }();
    return k;
}

pg::Fq accumulator_eval(const FlightPath& path) {
    pg::Fq k = accumulator_constant();
    pg::Fq acc;
    for (const Waypoint& w : path.points) {
        pg::Fq t = acc + pg::Fq(w.x) + pg::Fq(65536) * pg::Fq(w.y);
        acc = t * t * t + k;
    }
    return acc;
}

}  // namespace zaps::snark
