#pragma once

#include "zaps/ec.hpp"
#include "zaps/hash.hpp"
#include "zaps/pairing.hpp"

namespace zaps::snark {

using ec::Curve;
using ec::CurvePoint;
using ec::Scalar;

// Planned route on a 2^16 x 2^16 grid.
struct Waypoint {
    uint16_t x = 0;
    uint16_t y = 0;
    bool operator==(const Waypoint&) const = default;
};

struct FlightPath {
    std::vector<Waypoint> points;
    bool operator==(const FlightPath&) const = default;
};

// Route lengths supported by the circuit family.
bool valid_waypoint_count(size_t n);

// Inclusive rectangle the route must stay inside.
struct Geofence {
    uint16_t x_min = 0, x_max = 0, y_min = 0, y_max = 0;

    bool contains(const Waypoint& w) const {
        return w.x >= x_min && w.x <= x_max && w.y >= y_min && w.y <= y_max;
    }
    bool operator==(const Geofence&) const = default;
};

// Throws std::invalid_argument when min exceeds max.
void validate_geofence(const Geofence& f);

// Canonical byte encoding of a path: per waypoint x||y as big-endian u16.
Bytes encode_path(const FlightPath& path);

struct PedersenOpening {
    Scalar r;
    FlightPath path;
};

struct PedersenCommitment {
    CurvePoint point;
};

// C = r*G + H(encode(path) || r)*G. The blinding scalar must be nonzero and
// the path length must be one of the supported counts.
PedersenCommitment commit(const Curve& curve, const FlightPath& path, const Scalar& r);

// The scalar s with C = s*G, i.e. r + H(encode(path) || r) mod n. This is
// what a proof of opening knowledge is about.
Scalar opening_scalar(const Curve& curve, const PedersenOpening& opening);

// Round constant for the accumulator: SHA-256("ZAPS-acc") reduced mod q.
pg::Fq accumulator_constant();

// Algebraic path digest matching the in-circuit accumulator:
//   acc_0 = 0,  acc_{i+1} = (acc_i + x_i + 2^16 * y_i)^3 + k   over F_q.
pg::Fq accumulator_eval(const FlightPath& path);

}  // namespace zaps::snark
