#pragma once

// Stabilizer encoder synthesis. Builds a Clifford circuit U with
//   U (|psi>_{0..K-1} (x) |0^{N-K}>) = |psi-bar>
// for a CSS code: X_i -> logical X_i, Z_i -> logical Z_i (i < K),
// Z_{K+j} -> j-th stabilizer generator, with exact + signs. The symplectic
// part is completed with CSS destabilizers and reduced to the identity by
// conjugation sweeps; the recorded gates, reversed and inverted, form the
// circuit, and a trailing Pauli layer repairs signs.

#include "ftqc/circuit.hpp"
#include "ftqc/tableau_sim.hpp"

namespace ftqc {

namespace detail {

// independent rows after lexicographic elimination
inline BitMat independent_rows(const BitMat& m) {
    BitMat red = m;
    auto pivots = red.row_reduce();
    BitMat out(0, m.num_cols());
    for (std::size_t i = 0; i < pivots.size(); ++i) out.append_row(red.row(i));
    return out;
}

}  // namespace detail


// Realize a target conjugation tableau exactly (bits and Hermitian signs).
// rows[i] (i < n) is the xz-encoded image of X_i, rows[n+i] of Z_i, with
// phases in the i^{ph} X^x Z^z encoding. Returns gates in circuit order.
inline std::vector<GateOp> synthesize_clifford(std::vector<BitVec> rows, std::vector<uint8_t> phases) {
    std::size_t n = rows.size() / 2;
    for (std::size_t i = 0; i < 2 * n; ++i)
        for (std::size_t j = i; j < 2 * n; ++j) {
            bool want = (j == i + n);
            if (symplectic_inner_bits(rows[i], rows[j]) != want)
                throw std::invalid_argument("synthesize_clifford: rows not symplectic");
        }
    std::vector<BitVec> target_rows = rows;
    std::vector<uint8_t> target_phases = phases;

    std::vector<GateOp> applied;
    auto conj_all = [&](const GateOp& g) {
        for (std::size_t i = 0; i < 2 * n; ++i) TableauSim::imulgate(rows[i], phases[i], g);
        applied.push_back(g);
    };
    auto swap_qubits = [&](std::size_t a, std::size_t b) {
        conj_all({Gate::CNOT, a, b});
        conj_all({Gate::CNOT, b, a});
        conj_all({Gate::CNOT, a, b});
    };
    auto clear_xrow = [&](std::size_t ri, std::size_t q) {
        BitVec& r = rows[ri];
        if (!r.get(q)) {
            std::size_t j = q;
            while (j < n && !r.get(j)) ++j;
            if (j == n) {
                std::size_t h = q;
                while (h < n && !r.get(n + h)) ++h;
                if (h == n) throw std::logic_error("synthesize_clifford: empty row in sweep");
                conj_all({Gate::H, h});
                j = h;
            }
            if (j != q) swap_qubits(q, j);
        }
        for (std::size_t c2 = q + 1; c2 < n; ++c2)
            if (r.get(c2)) conj_all({Gate::CNOT, q, c2});
        if (r.get(n + q)) conj_all({Gate::S, q});
        for (std::size_t c2 = 0; c2 < n; ++c2)
            if (c2 != q && r.get(n + c2)) conj_all({Gate::CZ, q, c2});
    };
    for (std::size_t q = 0; q < n; ++q) {
        clear_xrow(q, q);
        BitVec zq(2 * n);
        zq.set(n + q, true);
        if (!(rows[n + q] == zq)) {
            conj_all({Gate::H, q});
            clear_xrow(n + q, q);
            conj_all({Gate::H, q});
        }
    }
    for (std::size_t i = 0; i < 2 * n; ++i) {
        BitVec e(2 * n);
        e.set(i, true);
        if (!(rows[i] == e)) throw std::logic_error("synthesize_clifford: sweep did not reach identity");
    }

    std::vector<GateOp> fwd;
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
        GateOp g = *it;
        if (g.g == Gate::S) g.g = Gate::Sdg;
        else if (g.g == Gate::Sdg) g.g = Gate::S;
        fwd.push_back(g);
    }

    // sign repair: flip any image whose Hermitian sign disagrees with target
    CliffordMap cm = CliffordMap::from_gates(n, fwd);
    BitVec fix_bits(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        bool got = TableauSim::hermitian_sign(cm.row(j), cm.row_phase(j));
        bool want = TableauSim::hermitian_sign(target_rows[j], target_phases[j]);
        if (got != want) {
            std::size_t partner = j < n ? j + n : j - n;
            fix_bits ^= cm.row(partner);
        }
    }
    for (std::size_t qb = 0; qb < n; ++qb) {
        bool fx = fix_bits.get(qb), fz = fix_bits.get(n + qb);
        if (fx && fz)
            fwd.push_back({Gate::Y, qb});
        else if (fx)
            fwd.push_back({Gate::X, qb});
        else if (fz)
            fwd.push_back({Gate::Z, qb});
    }
    // the physical operation set has no CZ: rewrite as H-CNOT-H
    std::vector<GateOp> phys;
    for (const auto& g : fwd) {
        if (g.g == Gate::CZ) {
            phys.push_back({Gate::H, g.q1});
            phys.push_back({Gate::CNOT, g.q0, g.q1});
            phys.push_back({Gate::H, g.q1});
        } else {
            phys.push_back(g);
        }
    }
    return phys;
}

// Gate realization of a CliffordMap (exact, including folded signs where
// the image is Hermitian).
inline std::vector<GateOp> clifford_to_gates(const CliffordMap& target) {
    std::vector<BitVec> rows;
    std::vector<uint8_t> phases;
    for (std::size_t j = 0; j < 2 * target.num_qubits(); ++j) {
        rows.push_back(target.row(j));
        phases.push_back(target.row_phase(j));
    }
    return synthesize_clifford(std::move(rows), std::move(phases));
}

struct EncoderSynthesis {
    std::vector<GateOp> gates;      // circuit order, includes the sign-fix Pauli layer
    CliffordMap map;                // the realized Clifford
    std::vector<PauliWord> stabilizers;  // image of Z_{K+j}: the chosen generator set, + signs
    std::vector<PauliWord> logical_x, logical_z;  // images of X_i / Z_i, + signs
};

inline EncoderSynthesis synthesize_encoder(const CssCode& code) {
    std::size_t n = code.n_phys, k = code.k_logical;
    BitMat gx = detail::independent_rows(code.pcp.h_x);
    BitMat gz = detail::independent_rows(code.pcp.h_z);
    std::size_t rx = gx.num_rows(), rz = gz.num_rows();
    if (rx + rz + k != n) throw std::logic_error("encoder: rank accounting failed");

    // --- destabilizers -----------------------------------------------------
    // Z-type destabilizers for the X generators: z . gx_i = delta, z . lx = 0
    std::vector<BitVec> dz(rx), dx(rz);
    {
        BitMat a(0, n);
        for (std::size_t i = 0; i < rx; ++i) a.append_row(gx.row(i));
        for (std::size_t i = 0; i < k; ++i) a.append_row(code.logical_x[i].x);
        BitMat at = a.transpose();
        for (std::size_t i = 0; i < rx; ++i) {
            BitVec target(rx + k);
            target.set(i, true);
            auto sol = at.solve_left(target);
            if (!sol) throw std::logic_error("encoder: no Z destabilizer");
            dz[i] = *sol;
        }
    }
    // X-type destabilizers for the Z generators: also commute with the dz's
    {
        BitMat a(0, n);
        for (std::size_t i = 0; i < rz; ++i) a.append_row(gz.row(i));
        for (std::size_t i = 0; i < k; ++i) a.append_row(code.logical_z[i].z);
        for (std::size_t i = 0; i < rx; ++i) a.append_row(dz[i]);
        BitMat at = a.transpose();
        for (std::size_t i = 0; i < rz; ++i) {
            BitVec target(rz + k + rx);
            target.set(i, true);
            auto sol = at.solve_left(target);
            if (!sol) throw std::logic_error("encoder: no X destabilizer");
            dx[i] = *sol;
        }
    }

    // --- target tableau ----------------------------------------------------
    // rows 0..n-1: images of X_i; rows n..2n-1: images of Z_i
    auto xz = [n](const BitVec& x, const BitVec& z) {
        BitVec v(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (x.get(i)) v.set(i, true);
            if (z.get(i)) v.set(n + i, true);
        }
        return v;
    };
    BitVec zero(n);
    std::vector<BitVec> rows(2 * n, BitVec(2 * n));
    for (std::size_t i = 0; i < k; ++i) {
        rows[i] = xz(code.logical_x[i].x, zero);
        rows[n + i] = xz(zero, code.logical_z[i].z);
    }
    for (std::size_t j = 0; j < rx; ++j) {
        rows[k + j] = xz(zero, dz[j]);      // destabilizer of X generator j
        rows[n + k + j] = xz(gx.row(j), zero);  // X generator j
    }
    for (std::size_t j = 0; j < rz; ++j) {
        rows[k + rx + j] = xz(dx[j], zero);
        rows[n + k + rx + j] = xz(zero, gz.row(j));
    }
    // sanity: symplectic basis
    for (std::size_t i = 0; i < 2 * n; ++i)
        for (std::size_t j = i; j < 2 * n; ++j) {
            bool want = (j == i + n);
            if (symplectic_inner_bits(rows[i], rows[j]) != want)
                throw std::logic_error("encoder: completed basis not symplectic");
        }

    std::vector<uint8_t> phases(2 * n, 0);
    std::vector<GateOp> fwd = synthesize_clifford(rows, phases);
    CliffordMap cm = CliffordMap::from_gates(n, fwd);

    EncoderSynthesis out;
    out.gates = std::move(fwd);
    out.map = cm;
    for (std::size_t j = 0; j < n - k; ++j) {
        PauliWord g = PauliWord::from_symplectic(cm.row(n + k + j));
        g.sign = TableauSim::hermitian_sign(cm.row(n + k + j), cm.row_phase(n + k + j));
        if (g.sign) throw std::logic_error("encoder: sign repair failed");
        out.stabilizers.push_back(g);
    }
    for (std::size_t i = 0; i < k; ++i) {
        PauliWord lx = PauliWord::from_symplectic(cm.row(i));
        lx.sign = TableauSim::hermitian_sign(cm.row(i), cm.row_phase(i));
        PauliWord lz = PauliWord::from_symplectic(cm.row(n + i));
        lz.sign = TableauSim::hermitian_sign(cm.row(n + i), cm.row_phase(n + i));
        if (lx.sign || lz.sign) throw std::logic_error("encoder: logical sign repair failed");
        out.logical_x.push_back(lx);
        out.logical_z.push_back(lz);
    }
    return out;
}

// ASAP-layered circuit of a gate list (measured depth <= c_D N is reported
// by the gadget layer).
inline Circuit layered_circuit(std::size_t width, const std::vector<GateOp>& gates, bool open = true) {
    Circuit c;
    c.width = width;
    c.open_circuit = open;
    std::vector<std::size_t> busy(width, 0);
    for (const auto& g : gates) {
        std::size_t t = busy[g.q0];
        if (gate_is_two_qubit(g.g)) t = std::max(t, busy[g.q1]);
        c.locations.push_back(loc_gate(t, g.g, g.q0, gate_is_two_qubit(g.g) ? g.q1 : kNoBit));
        busy[g.q0] = t + 1;
        if (gate_is_two_qubit(g.g)) busy[g.q1] = t + 1;
    }
    c.finalize();
    return c;
}

}  // namespace ftqc
