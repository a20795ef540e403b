#pragma once

// Executable fault-tolerance condition checks for the Steane-protocol
// gadgets: exhaustive s <= 1 fault enumeration against ideal-decoder /
// 0-filter oracles. Fault placements are enumerated exhaustively; intrinsic
// measurement randomness inside a gadget is sampled over seeds.

#include "ftqc/steane.hpp"

namespace ftqc {

// All single-fault variants of a circuit: for each location, the nontrivial
// Paulis on its support (measurement locations get an outcome flip).
struct FaultVariant {
    Circuit circuit;
    std::size_t location;
    std::string what;
};

namespace steane_detail {

inline void insert_pauli_after(Circuit& c, std::size_t loc_idx, const PauliWord& p) {
    const Location base = c.locations[loc_idx];
    std::vector<Location> ins;
    for (std::size_t i = 0; i < base.qubits.size() && i < p.n; ++i) {
        bool x = p.x.get(i), z = p.z.get(i);
        if (!x && !z) continue;
        Location g = loc_gate(base.t, x ? (z ? Gate::Y : Gate::X) : Gate::Z, base.qubits[i]);
        g.guard = base.guard;
        g.guard_negate = base.guard_negate;
        ins.push_back(g);
    }
    c.locations.insert(c.locations.begin() + long(loc_idx) + 1, ins.begin(), ins.end());
}

inline void insert_meas_flip(Circuit& c, std::size_t loc_idx) {
    const Location& base = c.locations[loc_idx];
    std::size_t one = c.alloc_bit();
    ClassicalStep k;
    k.t = base.t;
    k.kind = ClassicalKind::Const;
    k.payload = 1;
    k.out_bits = {one};
    k.guard = base.guard;
    k.guard_negate = base.guard_negate;
    ClassicalStep f;
    f.t = base.t;
    f.kind = ClassicalKind::Parity;
    f.in_bits = {base.c_out, one};
    f.out_bits = {base.c_out};
    f.guard = base.guard;
    f.guard_negate = base.guard_negate;
    // flips must run before any同-step consumer: prepend among steps at t
    auto it = c.classical.begin();
    while (it != c.classical.end() && it->t < base.t) ++it;
    it = c.classical.insert(it, f);
    c.classical.insert(it, k);
}

}  // namespace steane_detail

inline std::vector<FaultVariant> enumerate_single_faults(const Circuit& c) {
    std::vector<FaultVariant> out;
    static const char* pname[3] = {"X", "Z", "Y"};
    for (std::size_t i = 0; i < c.locations.size(); ++i) {
        const Location& l = c.locations[i];
        switch (l.kind) {
            case OpKind::MeasureZ: {
                FaultVariant v{c, i, "flip"};
                steane_detail::insert_meas_flip(v.circuit, i);
                out.push_back(std::move(v));
                break;
            }
            case OpKind::Prep0:
            case OpKind::PrepT:
            case OpKind::Wait:
            case OpKind::Gate:
            case OpKind::CondPauli: {
                std::size_t support = l.qubits.size();
                std::size_t count = (std::size_t(1) << (2 * support)) - 1;  // nontrivial paulis
                for (std::size_t m = 1; m <= count; ++m) {
                    PauliWord p(support);
                    for (std::size_t q = 0; q < support; ++q) {
                        p.x.set(q, (m >> (2 * q)) & 1);
                        p.z.set(q, (m >> (2 * q + 1)) & 1);
                    }
                    FaultVariant v{c, i, support == 1 ? pname[(m - 1) % 3] : "pp"};
                    steane_detail::insert_pauli_after(v.circuit, i, p);
                    out.push_back(std::move(v));
                }
                break;
            }
            default:
                break;  // markers / conditional Cliffords / selects carry no fault
        }
    }
    return out;
}

// Ideal decoder acting on a tableau state: read the syndrome from
// generator expectations, lookup-correct, and report whether the corrected
// block carries the expected logical eigenvalues. Returns nullopt when a
// syndrome is not deterministic (the block is entangled with something).
struct IdealDecodeResult {
    std::size_t correction_weight;
    int logical_z;  // +1/-1/0
    int logical_x;
};

inline std::optional<IdealDecodeResult> ideal_decode_block(TableauSim& sim, const std::array<std::size_t, 7>& block,
                                                           const SteaneContext& ctx) {
    std::size_t n = sim.num_qubits();
    auto embed7 = [&](const PauliWord& p) {
        PauliWord big(n);
        big.sign = p.sign;
        for (std::size_t q = 0; q < 7; ++q) {
            if (p.x.get(q)) big.x.set(block[q], true);
            if (p.z.get(q)) big.z.set(block[q], true);
        }
        return big;
    };
    std::array<bool, 3> syn_x{}, syn_z{};
    for (std::size_t g = 0; g < 3; ++g) {
        int ez = sim.expectation(embed7(ctx.code.z_generator(g)));  // detects X errors
        int ex = sim.expectation(embed7(ctx.code.x_generator(g)));  // detects Z errors
        if (ez == 0 || ex == 0) return std::nullopt;
        syn_x[g] = ez == -1;
        syn_z[g] = ex == -1;
    }
    PauliWord corr(7);
    if (auto pos = hamming_decode(syn_x)) corr.x.set(*pos - 1, true);
    if (auto pos = hamming_decode(syn_z)) corr.z.set(*pos - 1, true);
    std::size_t w = weight(corr);
    sim.apply_pauli_frame(embed7(corr).symplectic().none() ? PauliWord(n) : embed7(corr));
    IdealDecodeResult out;
    out.correction_weight = w;
    out.logical_z = sim.expectation(embed7(ctx.code.logical_z[0]));
    out.logical_x = sim.expectation(embed7(ctx.code.logical_x[0]));
    return out;
}

// 0-filter: trivial syndrome on both sides.
inline bool zero_filter_accepts(TableauSim& sim, const std::array<std::size_t, 7>& block, const SteaneContext& ctx) {
    std::size_t n = sim.num_qubits();
    auto embed7 = [&](const PauliWord& p) {
        PauliWord big(n);
        for (std::size_t q = 0; q < 7; ++q) {
            if (p.x.get(q)) big.x.set(block[q], true);
            if (p.z.get(q)) big.z.set(block[q], true);
        }
        return big;
    };
    for (std::size_t g = 0; g < 3; ++g) {
        if (sim.expectation(embed7(ctx.code.z_generator(g))) != 1) return false;
        if (sim.expectation(embed7(ctx.code.x_generator(g))) != 1) return false;
    }
    return true;
}

}  // namespace ftqc
