#pragma once

// Physical circuits of the LDPC-side gadgets and executable checkers for
// their fault-tolerance conditions. Preparation gadgets carry the open
// circuit; the concatenated-Steane compilation of that open circuit is the
// protocol layer's job.

#include "ftqc/encoder.hpp"
#include "ftqc/exec.hpp"

namespace ftqc {

enum class GadgetKind : uint8_t { ZkMeas, BellMeas, Pauli, Cnot, PrepZero, PrepClifford, PrepMagic, Ec };

inline const char* gadget_kind_name(GadgetKind k) {
    switch (k) {
        case GadgetKind::ZkMeas: return "zk-measurement";
        case GadgetKind::BellMeas: return "bell-measurement";
        case GadgetKind::Pauli: return "pauli";
        case GadgetKind::Cnot: return "cnot";
        case GadgetKind::PrepZero: return "prep-zero";
        case GadgetKind::PrepClifford: return "prep-clifford";
        case GadgetKind::PrepMagic: return "prep-magic";
        case GadgetKind::Ec: return "ec";
    }
    return "?";
}

// Magic-state preparation factors per logical qubit. TH|0> = |T>; H|0> is
// the teleportation-identity resource the compiler requests at positions
// without a T gate; I leaves |0>.
enum class MagicFactor : uint8_t { I, TH, H };

struct GadgetSpec {
    GadgetKind kind;
    CssCode code;
    Circuit circuit;  // for preps this is the underlying open circuit
    std::vector<std::vector<std::size_t>> blocks;  // data qubit ids per code block
    std::vector<std::size_t> out_bits;             // decoded logical outcome bits
    std::vector<std::size_t> in_bits;              // on-demand classical inputs
    std::size_t quantum_depth = 0;
    std::size_t classical_wait = 0;  // classical runtime in wait steps
    // EC split (Def-10 structure)
    std::size_t c1_depth = 0;
    std::size_t c2_depth = 0;
    std::vector<std::size_t> ec_flag_bits;
    std::vector<std::size_t> recovery_time;  // time step of the recovery layer
};

namespace detail {

inline void pad_waits(Circuit& c, const std::vector<std::size_t>& qubits, std::size_t t_end) {
    // fill every (qubit, t) hole with an explicit wait location: waits are
    // fault locations in the noise model
    std::vector<std::vector<bool>> busy(qubits.size(), std::vector<bool>(t_end, false));
    std::map<std::size_t, std::size_t> index;
    for (std::size_t i = 0; i < qubits.size(); ++i) index[qubits[i]] = i;
    for (const auto& l : c.locations)
        for (auto q : l.qubits) {
            auto it = index.find(q);
            if (it != index.end() && l.t < t_end) busy[it->second][l.t] = true;
        }
    for (std::size_t i = 0; i < qubits.size(); ++i)
        for (std::size_t t = 0; t < t_end; ++t)
            if (!busy[i][t]) c.locations.push_back(loc_simple(t, OpKind::Wait, qubits[i]));
    c.finalize();
}

}  // namespace detail

// Transversal Z measurement of one block; classical pipeline: Z-generator
// parities -> correcting decode of X errors -> logical Z parities.
inline GadgetSpec build_zk_measurement(const CssCode& code, std::size_t decode_loops_hint = 0) {
    (void)decode_loops_hint;
    GadgetSpec g;
    g.kind = GadgetKind::ZkMeas;
    g.code = code;
    std::size_t n = code.n_phys, k = code.k_logical;
    Circuit& c = g.circuit;
    c.width = n;
    c.open_circuit = true;
    int code_idx = c.add_code(code);

    std::size_t meas0 = c.alloc_bits(n);
    for (std::size_t q = 0; q < n; ++q) {
        auto l = loc_simple(0, OpKind::MeasureZ, q);
        l.c_out = meas0 + q;
        c.locations.push_back(l);
    }
    std::size_t mz = code.pcp.h_z.num_rows();
    std::size_t syn0 = c.alloc_bits(mz);
    for (std::size_t i = 0; i < mz; ++i) {
        ClassicalStep s;
        s.t = 1;
        s.kind = ClassicalKind::Parity;
        for (auto q : code.pcp.h_z.row(i).support()) s.in_bits.push_back(meas0 + q);
        s.out_bits = {syn0 + i};
        c.classical.push_back(s);
    }
    std::size_t rec0 = c.alloc_bits(n);
    {
        ClassicalStep s;
        s.t = 1;
        s.kind = ClassicalKind::CorrectDecode;
        s.code_idx = code_idx;
        s.side = 0;
        for (std::size_t i = 0; i < mz; ++i) s.in_bits.push_back(syn0 + i);
        for (std::size_t i = 0; i < n; ++i) s.out_bits.push_back(rec0 + i);
        s.wait_depth = std::size_t(std::ceil(4.0 * std::log2(double(std::max<std::size_t>(2, n)))));
        g.classical_wait = s.wait_depth;
        c.classical.push_back(s);
    }
    std::size_t out0 = c.alloc_bits(k);
    for (std::size_t i = 0; i < k; ++i) {
        ClassicalStep s;
        s.t = 1;
        s.kind = ClassicalKind::Parity;
        for (auto q : code.logical_z[i].z.support()) {
            s.in_bits.push_back(meas0 + q);
            s.in_bits.push_back(rec0 + q);
        }
        s.out_bits = {out0 + i};
        c.classical.push_back(s);
        g.out_bits.push_back(out0 + i);
    }
    c.finalize();
    g.blocks = {{}};
    for (std::size_t q = 0; q < n; ++q) g.blocks[0].push_back(q);
    g.quantum_depth = 1;
    return g;
}

// Transversal CNOT B1->B2, H on B1, transversal Z on both; decodes logical
// (x, z) pairs. Depth 3.
inline GadgetSpec build_bell_measurement(const CssCode& code) {
    GadgetSpec g;
    g.kind = GadgetKind::BellMeas;
    g.code = code;
    std::size_t n = code.n_phys, k = code.k_logical;
    Circuit& c = g.circuit;
    c.width = 2 * n;
    c.open_circuit = true;
    int code_idx = c.add_code(code);

    for (std::size_t q = 0; q < n; ++q) c.locations.push_back(loc_gate(0, Gate::CNOT, q, n + q));
    for (std::size_t q = 0; q < n; ++q) {
        c.locations.push_back(loc_gate(1, Gate::H, q));
        c.locations.push_back(loc_simple(1, OpKind::Wait, n + q));
    }
    std::size_t mx0 = c.alloc_bits(n), mz0 = c.alloc_bits(n);
    for (std::size_t q = 0; q < n; ++q) {
        auto l1 = loc_simple(2, OpKind::MeasureZ, q);
        l1.c_out = mx0 + q;  // X (x) X readout string from B1
        c.locations.push_back(l1);
        auto l2 = loc_simple(2, OpKind::MeasureZ, n + q);
        l2.c_out = mz0 + q;  // Z (x) Z readout string from B2
        c.locations.push_back(l2);
    }
    // x string carries Z-type errors, checked by X generators; z string the dual
    auto decode_side = [&](std::size_t meas0, bool x_string) {
        const BitMat& checks = x_string ? code.pcp.h_x : code.pcp.h_z;
        std::size_t m = checks.num_rows();
        std::size_t syn0 = c.alloc_bits(m);
        for (std::size_t i = 0; i < m; ++i) {
            ClassicalStep s;
            s.t = 3;
            s.kind = ClassicalKind::Parity;
            for (auto q : checks.row(i).support()) s.in_bits.push_back(meas0 + q);
            s.out_bits = {syn0 + i};
            c.classical.push_back(s);
        }
        std::size_t rec0 = c.alloc_bits(n);
        ClassicalStep s;
        s.t = 3;
        s.kind = ClassicalKind::CorrectDecode;
        s.code_idx = code_idx;
        s.side = x_string ? 1 : 0;
        for (std::size_t i = 0; i < m; ++i) s.in_bits.push_back(syn0 + i);
        for (std::size_t i = 0; i < n; ++i) s.out_bits.push_back(rec0 + i);
        s.wait_depth = std::size_t(std::ceil(4.0 * std::log2(double(std::max<std::size_t>(2, n)))));
        g.classical_wait = std::max(g.classical_wait, s.wait_depth);
        c.classical.push_back(s);
        std::size_t out0 = c.alloc_bits(k);
        for (std::size_t i = 0; i < k; ++i) {
            ClassicalStep p;
            p.t = 3;
            p.kind = ClassicalKind::Parity;
            const BitVec& supp = x_string ? code.logical_x[i].x : code.logical_z[i].z;
            for (auto q : supp.support()) {
                p.in_bits.push_back(meas0 + q);
                p.in_bits.push_back(rec0 + q);
            }
            p.out_bits = {out0 + i};
            c.classical.push_back(p);
            g.out_bits.push_back(out0 + i);
        }
    };
    decode_side(mx0, true);   // K bits of logical X(x)X outcomes
    decode_side(mz0, false);  // K bits of logical Z(x)Z outcomes
    c.finalize();
    g.blocks = {{}, {}};
    for (std::size_t q = 0; q < n; ++q) {
        g.blocks[0].push_back(q);
        g.blocks[1].push_back(n + q);
    }
    g.quantum_depth = 3;
    return g;
}

// F2 sum of the selected logical rows: the physical word implementing the
// logical Pauli with symplectic input bits (x_1..x_K, z_1..z_K).
inline PauliWord expand_logical_pauli(const CssCode& code, const BitVec& logical_bits) {
    if (logical_bits.size() != 2 * code.k_logical) throw std::invalid_argument("pauli gadget: need 2K bits");
    PauliWord p(code.n_phys);
    for (std::size_t i = 0; i < code.k_logical; ++i) {
        if (logical_bits.get(i)) p.x ^= code.logical_x[i].x;
        if (logical_bits.get(code.k_logical + i)) p.z ^= code.logical_z[i].z;
    }
    return p;
}

// On-demand Pauli gadget: 2K classical input bits, LogicalExpand, one layer
// of conditional physical Paulis. Depth 1.
inline GadgetSpec build_pauli_gadget(const CssCode& code) {
    GadgetSpec g;
    g.kind = GadgetKind::Pauli;
    g.code = code;
    std::size_t n = code.n_phys, k = code.k_logical;
    Circuit& c = g.circuit;
    c.width = n;
    c.open_circuit = true;
    int code_idx = c.add_code(code);
    std::size_t in0 = c.alloc_bits(2 * k);
    for (std::size_t i = 0; i < 2 * k; ++i) g.in_bits.push_back(in0 + i);
    std::size_t exp0 = c.alloc_bits(2 * n);
    ClassicalStep s;
    s.t = 0;
    s.kind = ClassicalKind::LogicalExpand;
    s.code_idx = code_idx;
    for (std::size_t i = 0; i < 2 * k; ++i) s.in_bits.push_back(in0 + i);
    for (std::size_t i = 0; i < 2 * n; ++i) s.out_bits.push_back(exp0 + i);
    s.wait_depth = std::size_t(std::ceil(std::log2(double(std::max<std::size_t>(2, n)))));
    g.classical_wait = s.wait_depth;
    c.classical.push_back(s);
    for (std::size_t q = 0; q < n; ++q) {
        Location l;
        l.t = 1;
        l.kind = OpKind::CondPauli;
        l.qubits = {q};
        l.bx = exp0 + q;
        l.bz = exp0 + n + q;
        c.locations.push_back(l);
    }
    c.finalize();
    g.blocks = {{}};
    for (std::size_t q = 0; q < n; ++q) g.blocks[0].push_back(q);
    g.quantum_depth = 1;
    return g;
}

// Transversal CNOT between two blocks; depth 1, width 2N.
inline GadgetSpec build_cnot_gadget(const CssCode& code) {
    GadgetSpec g;
    g.kind = GadgetKind::Cnot;
    g.code = code;
    std::size_t n = code.n_phys;
    g.circuit.width = 2 * n;
    g.circuit.open_circuit = true;
    for (std::size_t q = 0; q < n; ++q) g.circuit.locations.push_back(loc_gate(0, Gate::CNOT, q, n + q));
    g.circuit.finalize();
    g.blocks = {{}, {}};
    for (std::size_t q = 0; q < n; ++q) {
        g.blocks[0].push_back(q);
        g.blocks[1].push_back(n + q);
    }
    g.quantum_depth = 1;
    return g;
}

struct PrepTarget {
    GadgetKind kind;                    // PrepZero / PrepClifford / PrepMagic
    std::optional<CliffordMap> u_c;     // Clifford over 2K for PrepClifford
    std::vector<MagicFactor> magic_mask;  // K factors for PrepMagic
};

inline PrepTarget prep_zero_target() { return {GadgetKind::PrepZero, std::nullopt, {}}; }
inline PrepTarget prep_clifford_target(CliffordMap u_c) { return {GadgetKind::PrepClifford, std::move(u_c), {}}; }
inline PrepTarget prep_magic_target(std::vector<MagicFactor> mask) {
    return {GadgetKind::PrepMagic, std::nullopt, std::move(mask)};
}

// The underlying open circuit of a state-preparation gadget: unencoded
// target preparation followed by stabilizer encoders, ASAP layered.
inline GadgetSpec build_prep_open_circuit(const CssCode& code, const PrepTarget& target,
                                          const EncoderSynthesis* enc_hint = nullptr) {
    GadgetSpec g;
    g.kind = target.kind;
    g.code = code;
    std::size_t n = code.n_phys, k = code.k_logical;
    EncoderSynthesis enc_local;
    const EncoderSynthesis* enc = enc_hint;
    if (!enc) {
        enc_local = synthesize_encoder(code);
        enc = &enc_local;
    }

    std::size_t num_blocks = target.kind == GadgetKind::PrepClifford ? 4 : 1;
    Circuit& c = g.circuit;
    c.width = num_blocks * n;
    c.open_circuit = true;
    g.blocks.assign(num_blocks, {});
    for (std::size_t b = 0; b < num_blocks; ++b)
        for (std::size_t q = 0; q < n; ++q) g.blocks[b].push_back(b * n + q);

    std::vector<GateOp> gates;
    // unencoded target preparation on the input qubits (first K of each block)
    if (target.kind == GadgetKind::PrepZero) {
        for (std::size_t q = 0; q < n; ++q) c.locations.push_back(loc_simple(0, OpKind::Prep0, q));
    } else if (target.kind == GadgetKind::PrepMagic) {
        if (target.magic_mask.size() != k) throw std::invalid_argument("prep: magic mask arity");
        for (std::size_t q = 0; q < n; ++q) {
            if (q < k && target.magic_mask[q] == MagicFactor::TH)
                c.locations.push_back(loc_simple(0, OpKind::PrepT, q));
            else
                c.locations.push_back(loc_simple(0, OpKind::Prep0, q));
        }
        for (std::size_t q = 0; q < k; ++q)
            if (target.magic_mask[q] == MagicFactor::H) gates.push_back({Gate::H, q});
    } else {
        if (!target.u_c || target.u_c->num_qubits() != 2 * k)
            throw std::invalid_argument("prep: clifford target needs U_C over 2K");
        for (std::size_t q = 0; q < c.width; ++q) c.locations.push_back(loc_simple(0, OpKind::Prep0, q));
        // |Omega>: Phi pairs (B1,B3) and (B2,B4) on the input qubits
        for (std::size_t i = 0; i < k; ++i) {
            gates.push_back({Gate::H, 0 * n + i});
            gates.push_back({Gate::CNOT, 0 * n + i, 2 * n + i});
            gates.push_back({Gate::H, 1 * n + i});
            gates.push_back({Gate::CNOT, 1 * n + i, 3 * n + i});
        }
        // U_C on (B3, B4) inputs
        std::vector<std::size_t> uc_qubits;
        for (std::size_t i = 0; i < k; ++i) uc_qubits.push_back(2 * n + i);
        for (std::size_t i = 0; i < k; ++i) uc_qubits.push_back(3 * n + i);
        for (auto gop : clifford_to_gates(*target.u_c)) {
            gop.q0 = uc_qubits[gop.q0];
            if (gate_is_two_qubit(gop.g)) gop.q1 = uc_qubits[gop.q1];
            gates.push_back(gop);
        }
    }
    // encoders on each block
    for (std::size_t b = 0; b < num_blocks; ++b)
        for (auto gop : enc->gates) {
            gop.q0 += b * n;
            if (gate_is_two_qubit(gop.g)) gop.q1 += b * n;
            gates.push_back(gop);
        }
    // ASAP layering after the prep layer
    std::vector<std::size_t> busy(c.width, 1);
    for (const auto& gop : gates) {
        std::size_t t = busy[gop.q0];
        if (gate_is_two_qubit(gop.g)) t = std::max(t, busy[gop.q1]);
        c.locations.push_back(loc_gate(t, gop.g, gop.q0, gate_is_two_qubit(gop.g) ? gop.q1 : kNoBit));
        busy[gop.q0] = t + 1;
        if (gate_is_two_qubit(gop.g)) busy[gop.q1] = t + 1;
    }
    c.finalize();
    detail::pad_waits(c, [&] {
        std::vector<std::size_t> all;
        for (std::size_t q = 0; q < c.width; ++q) all.push_back(q);
        return all;
    }(), c.depth());
    g.quantum_depth = c.depth();
    return g;
}

// EC gadget: one fresh ancilla per generator, generator sub-circuits
// scheduled by greedy conflict-graph coloring, single-shot decode with T
// loops, depth-1 conditional recovery.
inline GadgetSpec build_ec_gadget(const CssCode& code, std::size_t decoder_loops) {
    GadgetSpec g;
    g.kind = GadgetKind::Ec;
    g.code = code;
    std::size_t n = code.n_phys;
    std::size_t mx = code.pcp.h_x.num_rows(), mz = code.pcp.h_z.num_rows();
    std::size_t m = mx + mz;
    Circuit& c = g.circuit;
    c.width = n + m;
    c.open_circuit = true;
    int code_idx = c.add_code(code);
    g.blocks = {{}};
    for (std::size_t q = 0; q < n; ++q) g.blocks[0].push_back(q);

    // conflict coloring: generators sharing a data qubit cannot overlap
    std::vector<BitVec> supports;
    for (std::size_t i = 0; i < mx; ++i) supports.push_back(code.pcp.h_x.row(i));
    for (std::size_t i = 0; i < mz; ++i) supports.push_back(code.pcp.h_z.row(i));
    std::vector<int> color(m, -1);
    int num_colors = 0;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<bool> used(m, false);
        for (std::size_t j = 0; j < i; ++j)
            if ((supports[i] & supports[j]).any() && color[j] >= 0) used[std::size_t(color[j])] = true;
        int col = 0;
        while (used[std::size_t(col)]) ++col;
        color[i] = col;
        num_colors = std::max(num_colors, col + 1);
    }

    // per-color time offsets; each generator circuit has depth r+4 (X) or r+2 (Z)
    std::vector<std::size_t> color_depth(std::size_t(num_colors), 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t r = supports[i].popcount();
        std::size_t need = (i < mx) ? r + 4 : r + 2;
        color_depth[std::size_t(color[i])] = std::max(color_depth[std::size_t(color[i])], need);
    }
    std::vector<std::size_t> color_start(std::size_t(num_colors), 0);
    for (int cidx = 1; cidx < num_colors; ++cidx)
        color_start[std::size_t(cidx)] = color_start[std::size_t(cidx - 1)] + color_depth[std::size_t(cidx - 1)];
    std::size_t d_synd = color_start[std::size_t(num_colors - 1)] + color_depth[std::size_t(num_colors - 1)];

    std::size_t synd0 = c.alloc_bits(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t anc = n + i;
        std::size_t t0 = color_start[std::size_t(color[i])];
        auto supp = supports[i].support();
        if (i < mx) {
            // X generator: |+>-controlled parity onto data
            c.locations.push_back(loc_simple(t0, OpKind::Prep0, anc));
            c.locations.push_back(loc_gate(t0 + 1, Gate::H, anc));
            for (std::size_t j = 0; j < supp.size(); ++j)
                c.locations.push_back(loc_gate(t0 + 2 + j, Gate::CNOT, anc, supp[j]));
            c.locations.push_back(loc_gate(t0 + 2 + supp.size(), Gate::H, anc));
            auto l = loc_simple(t0 + 3 + supp.size(), OpKind::MeasureZ, anc);
            l.c_out = synd0 + i;
            c.locations.push_back(l);
        } else {
            // Z generator: data-controlled parity onto the ancilla
            c.locations.push_back(loc_simple(t0, OpKind::Prep0, anc));
            for (std::size_t j = 0; j < supp.size(); ++j)
                c.locations.push_back(loc_gate(t0 + 1 + j, Gate::CNOT, supp[j], anc));
            auto l = loc_simple(t0 + 1 + supp.size(), OpKind::MeasureZ, anc);
            l.c_out = synd0 + i;
            c.locations.push_back(l);
        }
    }

    // decodes: sigma_X lives in Z-generator outcomes, sigma_Z in X-generator
    std::size_t recx0 = c.alloc_bits(n + 1), recz0 = c.alloc_bits(n + 1);
    {
        ClassicalStep s;
        s.t = d_synd;
        s.kind = ClassicalKind::SsfDecode;
        s.code_idx = code_idx;
        s.side = 0;
        for (std::size_t i = 0; i < mz; ++i) s.in_bits.push_back(synd0 + mx + i);
        for (std::size_t i = 0; i <= n; ++i) s.out_bits.push_back(recx0 + i);
        s.wait_depth = decoder_loops;
        c.classical.push_back(s);
    }
    {
        ClassicalStep s;
        s.t = d_synd;
        s.kind = ClassicalKind::SsfDecode;
        s.code_idx = code_idx;
        s.side = 1;
        for (std::size_t i = 0; i < mx; ++i) s.in_bits.push_back(synd0 + i);
        for (std::size_t i = 0; i <= n; ++i) s.out_bits.push_back(recz0 + i);
        s.wait_depth = decoder_loops;
        c.classical.push_back(s);
    }
    g.ec_flag_bits = {recx0 + n, recz0 + n};
    g.classical_wait = decoder_loops;

    // recovery layer after the classical wait
    std::size_t t_rec = d_synd + decoder_loops;
    for (std::size_t q = 0; q < n; ++q) {
        Location l;
        l.t = t_rec;
        l.kind = OpKind::CondPauli;
        l.qubits = {q};
        l.bx = recx0 + q;
        l.bz = recz0 + q;
        c.locations.push_back(l);
    }
    g.recovery_time = {t_rec};
    c.finalize();
    detail::pad_waits(c, g.blocks[0], t_rec + 1);
    g.quantum_depth = c.depth();
    g.c1_depth = d_synd;
    g.c2_depth = decoder_loops + 1;
    return g;
}

// --- fault-tolerance condition checks -------------------------------------

struct FtClause {
    std::string name;
    bool pass;
    std::string detail;
};

struct FtReport {
    std::vector<FtClause> clauses;
    bool pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
};

struct FtConstants {
    std::size_t d0;
    double c_w;
    double c_d;
};

namespace detail {

inline bool ops_at_most_two_qubits(const Circuit& c) {
    for (const auto& l : c.locations)
        if (l.qubits.size() > 2) return false;
    return true;
}

// reduce a symplectic vector by the code's stabilizer rows on both sides
inline bool equal_mod_stabilizers(const CssCode& code, std::size_t blocks, const BitVec& a, const BitVec& b) {
    std::size_t n = code.n_phys * blocks;
    BitVec diff = a ^ b;
    BitMat rows(0, 2 * n);
    for (std::size_t bidx = 0; bidx < blocks; ++bidx) {
        for (std::size_t i = 0; i < code.pcp.h_x.num_rows(); ++i) {
            BitVec v(2 * n);
            for (auto q : code.pcp.h_x.row(i).support()) v.set(bidx * code.n_phys + q, true);
            rows.append_row(v);
        }
        for (std::size_t i = 0; i < code.pcp.h_z.num_rows(); ++i) {
            BitVec v(2 * n);
            for (auto q : code.pcp.h_z.row(i).support()) v.set(n + bidx * code.n_phys + q, true);
            rows.append_row(v);
        }
    }
    return rows.in_row_space(diff);
}

}  // namespace detail

// Noiseless logical action of the CNOT gadget, checked symplectically.
inline bool cnot_gadget_action_ok(const GadgetSpec& g) {
    std::size_t n = g.code.n_phys, k = g.code.k_logical;
    std::vector<GateOp> gates;
    for (const auto& l : g.circuit.locations)
        if (l.kind == OpKind::Gate) gates.push_back({l.gate, l.qubits[0], l.qubits.size() > 1 ? l.qubits[1] : 0});
    auto cm = CliffordMap::from_gates(2 * n, gates);
    auto embed = [&](const PauliWord& p, std::size_t block) {
        PauliWord big(2 * n);
        for (std::size_t q = 0; q < n; ++q) {
            if (p.x.get(q)) big.x.set(block * n + q, true);
            if (p.z.get(q)) big.z.set(block * n + q, true);
        }
        return big;
    };
    for (std::size_t i = 0; i < k; ++i) {
        // X1 -> X1 X2, X2 -> X2, Z1 -> Z1, Z2 -> Z1 Z2 on logical operators
        auto x1 = cm.conjugate(embed(g.code.logical_x[i], 0));
        auto want_x1 = pauli_mul(embed(g.code.logical_x[i], 0), embed(g.code.logical_x[i], 1));
        if (!detail::equal_mod_stabilizers(g.code, 2, x1.symplectic(), want_x1.symplectic())) return false;
        auto x2 = cm.conjugate(embed(g.code.logical_x[i], 1));
        if (!detail::equal_mod_stabilizers(g.code, 2, x2.symplectic(), embed(g.code.logical_x[i], 1).symplectic()))
            return false;
        auto z1 = cm.conjugate(embed(g.code.logical_z[i], 0));
        if (!detail::equal_mod_stabilizers(g.code, 2, z1.symplectic(), embed(g.code.logical_z[i], 0).symplectic()))
            return false;
        auto z2 = cm.conjugate(embed(g.code.logical_z[i], 1));
        auto want_z2 = pauli_mul(embed(g.code.logical_z[i], 0), embed(g.code.logical_z[i], 1));
        if (!detail::equal_mod_stabilizers(g.code, 2, z2.symplectic(), want_z2.symplectic())) return false;
    }
    return true;
}

inline FtReport check_ft_conditions(const GadgetSpec& g, const FtConstants& k) {
    FtReport rep;
    auto add = [&](const std::string& name, bool pass, const std::string& det = "") {
        rep.clauses.push_back({name, pass, det});
    };
    std::size_t n = g.code.n_phys;
    switch (g.kind) {
        case GadgetKind::Cnot:
        case GadgetKind::Pauli:
        case GadgetKind::ZkMeas:
        case GadgetKind::BellMeas: {
            add("width <= c_W N", double(g.circuit.width) <= k.c_w * double(n));
            add("depth <= d_0", g.quantum_depth <= k.d0);
            add("ops on <= 2 qubits", detail::ops_at_most_two_qubits(g.circuit));
            bool action = true;
            if (g.kind == GadgetKind::Cnot) action = cnot_gadget_action_ok(g);
            add("noiseless action", action);
            break;
        }
        case GadgetKind::PrepZero:
        case GadgetKind::PrepClifford:
        case GadgetKind::PrepMagic: {
            add("open width <= c_W N", double(g.circuit.width) <= k.c_w * double(n) * double(g.blocks.size()));
            add("open depth <= c_D N", double(g.quantum_depth) <= k.c_d * double(n));
            add("ops on <= 2 qubits", detail::ops_at_most_two_qubits(g.circuit));
            break;
        }
        case GadgetKind::Ec: {
            bool synd_done = true;  // all measurement locations inside C1
            for (const auto& l : g.circuit.locations)
                if (l.kind == OpKind::MeasureZ && l.t >= g.c1_depth) synd_done = false;
            add("syndrome bits obtained in C1", synd_done);
            add("C1 depth <= d_0", g.c1_depth <= k.d0);
            add("C1 ops on <= 2 qubits", detail::ops_at_most_two_qubits(g.circuit));
            bool c2_single = true;
            for (const auto& l : g.circuit.locations)
                if (l.t >= g.c1_depth && l.qubits.size() > 1) c2_single = false;
            add("C2 single-qubit only", c2_single);
            add("C2 depth independent of N", g.c2_depth == g.classical_wait + 1);
            add("recovery uses single-shot decode", !g.ec_flag_bits.empty());
            add("width <= c_W N", double(g.circuit.width) <= k.c_w * double(n));
            break;
        }
    }
    return rep;
}

// Gadget serialization with boundary markers.
inline void write_gadget(std::ostream& os, const GadgetSpec& g) {
    os << "#GADGET " << gadget_kind_name(g.kind) << " BEGIN\n";
    os << "WIDTH " << g.circuit.width << " DEPTH " << g.circuit.depth() << " MODE open\n";
    for (const auto& l : g.circuit.locations) {
        const char* name = op_text_name(l);
        if (!name) {
            os << "# t=" << l.t << " op=" << (l.kind == OpKind::CondPauli ? "cond-pauli" : "cond") << " q=" << l.qubits[0]
               << '\n';
            continue;
        }
        os << "t=" << l.t << " op=" << name << " q=";
        for (std::size_t i = 0; i < l.qubits.size(); ++i) os << (i ? "," : "") << l.qubits[i];
        if (l.c_out != kNoBit) os << " c_out=" << l.c_out;
        os << '\n';
    }
    os << "#GADGET " << gadget_kind_name(g.kind) << " END\n";
}

}  // namespace ftqc
