#pragma once

#include "zaps/commit.hpp"
#include "zaps/snark.hpp"

namespace zaps::snark {

// Compiled constraint system for one route-length class, together with the
// wire bookkeeping the witness builder needs.
//
// Statement wires (1..5): x_min, x_max, y_min, y_max, accumulator output.
// Per waypoint the circuit enforces
//   - 16-bit binary decompositions of x and y (so both lie on the grid),
//   - 16-bit decompositions of x - x_min, x_max - x, y - y_min, y_max - y
//     (inclusive containment in the fence),
//   - two multiplication steps of the cube-and-add accumulator,
// and one final constraint pinning the accumulator output wire.
// Constraint count: 104 * n + 1 for n waypoints.
struct FlightCircuit {
    R1CSystem cs;
    size_t n_waypoints;

    // Wire layout per waypoint, in allocation order.
    struct WpWires {
        uint32_t x, y;
        std::array<uint32_t, 16> x_bits, y_bits;
        std::array<uint32_t, 16> dx_lo, dx_hi, dy_lo, dy_hi;  // range-check bits
        uint32_t sq, cube;                                    // accumulator steps
    };
    std::vector<WpWires> wp;

    FlightCircuit() : cs(5), n_waypoints(0) {}
};

// Closed-form constraint count for a route of n waypoints.
constexpr size_t flight_constraint_count(size_t n) { return 104 * n + 1; }

// Throws std::invalid_argument for unsupported waypoint counts.
FlightCircuit compile_flight_circuit(size_t n_waypoints);

// Full assignment (public inputs + witness) for a path under a fence. The
// returned vector satisfies the system exactly when every waypoint lies
// inside the fence; gen-proof's satisfaction check is the enforcement point.
std::vector<Fq> flight_assignment(const FlightCircuit& circuit, const FlightPath& path,
                                  const Geofence& fence);

// The statement slice: (x_min, x_max, y_min, y_max, accumulator_eval(path)).
std::vector<Fq> flight_public_inputs(const Geofence& fence, Fq acc_out);

}  // namespace zaps::snark
