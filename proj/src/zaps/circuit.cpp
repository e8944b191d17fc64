#include "zaps/circuit.hpp"

namespace zaps::snark {

namespace {

constexpr uint32_t kOneWire = 0;
constexpr uint32_t kXMin = 1, kXMax = 2, kYMin = 3, kYMax = 4, kAccOut = 5;

// b * b = b
void bool_constraint(R1CSystem& cs, uint32_t bit) {
    LinComb b;
    b.add(bit, Fq(1));
    cs.add_constraint(b, b, b);
}

// sum 2^j * bits[j] = value (an arbitrary linear combination)
void pack_constraint(R1CSystem& cs, const std::array<uint32_t, 16>& bits, LinComb value) {
    LinComb sum;
    for (int j = 0; j < 16; ++j) sum.add(bits[j], Fq(uint64_t(1) << j));
    LinComb one;
    one.add(kOneWire, Fq(1));
    cs.add_constraint(std::move(sum), std::move(one), std::move(value));
}

std::array<uint32_t, 16> alloc_bits(R1CSystem& cs) {
    std::array<uint32_t, 16> bits;
    for (auto& b : bits) b = cs.allocate_wire();
    return bits;
}

void decompose(R1CSystem& cs, const std::array<uint32_t, 16>& bits, LinComb value) {
    for (uint32_t b : bits) bool_constraint(cs, b);
    pack_constraint(cs, bits, std::move(value));
}

LinComb wire_lc(uint32_t w) {
    LinComb lc;
    lc.add(w, Fq(1));
    return lc;
}

LinComb diff_lc(uint32_t pos, uint32_t neg) {
    LinComb lc;
    lc.add(pos, Fq(1));
    lc.add(neg, -Fq(1));
    return lc;
}

void assign_bits(std::vector<Fq>& z, const std::array<uint32_t, 16>& wires, uint64_t value) {
    for (int j = 0; j < 16; ++j) z[wires[j]] = Fq((value >> j) & 1);
}

}  // namespace

FlightCircuit compile_flight_circuit(size_t n_waypoints) {
    if (!valid_waypoint_count(n_waypoints)) {
        throw std::invalid_argument("compile_flight_circuit: unsupported waypoint count");
    }
    FlightCircuit fc;
    fc.n_waypoints = n_waypoints;
    R1CSystem& cs = fc.cs;
    const Fq k = accumulator_constant();
    const Fq shift(65536);

    uint32_t prev_cube = 0;  // valid from the second waypoint on
    for (size_t i = 0; i < n_waypoints; ++i) {
        FlightCircuit::WpWires w{};
        w.x = cs.allocate_wire();
        w.y = cs.allocate_wire();
        w.x_bits = alloc_bits(cs);
        w.y_bits = alloc_bits(cs);
        w.dx_lo = alloc_bits(cs);
        w.dx_hi = alloc_bits(cs);
        w.dy_lo = alloc_bits(cs);
        w.dy_hi = alloc_bits(cs);
        w.sq = cs.allocate_wire();
        w.cube = cs.allocate_wire();

        decompose(cs, w.x_bits, wire_lc(w.x));
        decompose(cs, w.y_bits, wire_lc(w.y));
        decompose(cs, w.dx_lo, diff_lc(w.x, kXMin));
        decompose(cs, w.dx_hi, diff_lc(kXMax, w.x));
        decompose(cs, w.dy_lo, diff_lc(w.y, kYMin));
        decompose(cs, w.dy_hi, diff_lc(kYMax, w.y));

        // t_i = acc_i + x_i + 2^16 * y_i with acc_0 = 0, acc_i = cube_{i-1} + k.
        LinComb t;
        t.add(w.x, Fq(1));
        t.add(w.y, shift);
        if (i > 0) {
            t.add(prev_cube, Fq(1));
            t.add(kOneWire, k);
        }
        cs.add_constraint(t, t, wire_lc(w.sq));
        cs.add_constraint(wire_lc(w.sq), t, wire_lc(w.cube));

        prev_cube = w.cube;
        fc.wp.push_back(w);
    }

    // acc_out = cube_{n-1} + k
    LinComb final_acc;
    final_acc.add(prev_cube, Fq(1));
    final_acc.add(kOneWire, k);
    LinComb one;
    one.add(kOneWire, Fq(1));
    cs.add_constraint(std::move(final_acc), std::move(one), wire_lc(kAccOut));

    return fc;
}

std::vector<Fq> flight_assignment(const FlightCircuit& circuit, const FlightPath& path,
                                  const Geofence& fence) {
    if (path.points.size() != circuit.n_waypoints) {
        throw std::invalid_argument("flight_assignment: path length does not match circuit");
    }
    validate_geofence(fence);
    std::vector<Fq> z(circuit.cs.num_wires());
    z[kOneWire] = Fq(1);
    z[kXMin] = Fq(fence.x_min);
    z[kXMax] = Fq(fence.x_max);
    z[kYMin] = Fq(fence.y_min);
    z[kYMax] = Fq(fence.y_max);
    z[kAccOut] = accumulator_eval(path);

    const Fq k = accumulator_constant();
    Fq acc;
    for (size_t i = 0; i < circuit.n_waypoints; ++i) {
        const auto& w = circuit.wp[i];
        const Waypoint& p = path.points[i];
        z[w.x] = Fq(p.x);
        z[w.y] = Fq(p.y);
        assign_bits(z, w.x_bits, p.x);
        assign_bits(z, w.y_bits, p.y);
        // Out-of-fence differences wrap mod 2^16; the packing constraint then
        // fails, which is exactly the rejection path.
        assign_bits(z, w.dx_lo, uint16_t(p.x - fence.x_min));
        assign_bits(z, w.dx_hi, uint16_t(fence.x_max - p.x));
        assign_bits(z, w.dy_lo, uint16_t(p.y - fence.y_min));
        assign_bits(z, w.dy_hi, uint16_t(fence.y_max - p.y));

        Fq t = acc + Fq(p.x) + Fq(65536) * Fq(p.y);
        Fq sq = t * t;
        Fq cube = sq * t;
        z[w.sq] = sq;
        z[w.cube] = cube;
        acc = cube + k;
    }
    return z;
}

std::vector<Fq> flight_public_inputs(const Geofence& fence, Fq acc_out) {
    return {Fq(fence.x_min), Fq(fence.x_max), Fq(fence.y_min), Fq(fence.y_max), acc_out};
}

}  // namespace zaps::snark
