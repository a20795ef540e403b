#pragma once

// Concatenated-Steane protocol for open circuits: verified |0> and |T>
// preparation, Knill error correction, the decoding gadget, and the
// recursive level compiler turning a level-l circuit of elementary
// operations into a level-(l-1) circuit of rectangles, with decoding
// gadgets appended for open circuits.
//
// Wire banks: each level-l wire owns kBank level-(l-1) wires: 7 data
// children, four auxiliary blocks of 7 (verified preparations and Knill
// ancillas), and four single wires (measurement ancilla, flag, teleport
// spare, scratch).

#include "ftqc/encoder.hpp"
#include "ftqc/exec.hpp"

namespace ftqc {

// Aux blocks 0..5 and 6..11 are the two EC ancilla buffers (double-buffered
// so the next slice's ancillas charge during the current teleport); blocks
// 12..14 serve gadget-internal ancillas (preparation copies, detection).
constexpr std::size_t kBankAuxBlocks = 15;
constexpr std::size_t kBankSingles = 4;
constexpr std::size_t kBank = 7 + 7 * kBankAuxBlocks + kBankSingles;  // 116

// Compact Steane encoder: input |psi> on qubit 0 with X-bar = Z-bar on
// {0,1,2}; H seeds on {3,4,5} drive the cascades of the generator basis
// {0,1,3,6}, {0,2,4,6}, {1,2,5,6}. 14 gates, depth 7. Verified against the
// tableau at construction.
inline EncoderSynthesis steane_compact_encoder(const CssCode& code) {
    std::vector<GateOp> gates;
    gates.push_back({Gate::CNOT, 0, 1});
    gates.push_back({Gate::CNOT, 0, 2});
    for (std::size_t h : {std::size_t(3), std::size_t(4), std::size_t(5)}) gates.push_back({Gate::H, h});
    auto cascade = [&](std::size_t h, std::initializer_list<std::size_t> supp) {
        for (auto q : supp)
            if (q != h) gates.push_back({Gate::CNOT, h, q});
    };
    cascade(3, {0, 1, 3, 6});
    cascade(4, {0, 2, 4, 6});
    cascade(5, {1, 2, 5, 6});
    EncoderSynthesis out;
    out.gates = gates;
    out.map = CliffordMap::from_gates(7, gates);
    BitMat stab(0, 14);
    for (int r = 0; r < 3; ++r) {
        BitVec v(14);
        for (auto q : code.pcp.h_x.row(std::size_t(r)).support()) v.set(q, true);
        stab.append_row(v);
        BitVec w(14);
        for (auto q : code.pcp.h_z.row(std::size_t(r)).support()) w.set(7 + q, true);
        stab.append_row(w);
    }
    for (std::size_t j = 1; j < 7; ++j) {
        if (!stab.in_row_space(out.map.row(7 + j)) ||
            TableauSim::hermitian_sign(out.map.row(7 + j), out.map.row_phase(7 + j)))
            throw std::logic_error("steane encoder: ancilla Z image invalid");
        PauliWord g = PauliWord::from_symplectic(out.map.row(7 + j));
        out.stabilizers.push_back(g);
    }
    if (!stab.in_row_space(out.map.row(0) ^ code.logical_x[0].symplectic()) ||
        !stab.in_row_space(out.map.row(7) ^ code.logical_z[0].symplectic()) ||
        TableauSim::hermitian_sign(out.map.row(0), out.map.row_phase(0)) ||
        TableauSim::hermitian_sign(out.map.row(7), out.map.row_phase(7)))
        throw std::logic_error("steane encoder: logical image invalid");
    out.logical_x.push_back(PauliWord::from_symplectic(out.map.row(0)));
    out.logical_z.push_back(PauliWord::from_symplectic(out.map.row(7)));
    return out;
}

struct SteaneContext {
    CssCode code;
    EncoderSynthesis enc;

    static const SteaneContext& instance() {
        static SteaneContext ctx = [] {
            SteaneContext c;
            c.code = steane();
            c.enc = steane_compact_encoder(c.code);
            return c;
        }();
        return ctx;
    }
};

struct Bank {
    std::size_t base;
    std::array<std::size_t, 7> data() const {
        std::array<std::size_t, 7> d{};
        for (std::size_t i = 0; i < 7; ++i) d[i] = base + i;
        return d;
    }
    std::array<std::size_t, 7> aux_block(std::size_t b) const {
        std::array<std::size_t, 7> d{};
        for (std::size_t i = 0; i < 7; ++i) d[i] = base + 7 + 7 * b + i;
        return d;
    }
    std::size_t single(std::size_t s) const { return base + 7 + 7 * kBankAuxBlocks + s; }
};

namespace steane_detail {

inline std::size_t append_encoder(Circuit& c, std::size_t t0, const EncoderSynthesis& enc,
                                  const std::array<std::size_t, 7>& wires, std::size_t guard = kNoBit,
                                  bool guard_negate = false) {
    std::vector<std::size_t> busy(7, t0);
    std::size_t end = t0;
    for (const auto& g : enc.gates) {
        std::size_t t = busy[g.q0];
        if (gate_is_two_qubit(g.g)) t = std::max(t, busy[g.q1]);
        Location l = loc_gate(t, g.g, wires[g.q0], gate_is_two_qubit(g.g) ? wires[g.q1] : kNoBit);
        l.guard = guard;
        l.guard_negate = guard_negate;
        c.locations.push_back(l);
        busy[g.q0] = t + 1;
        if (gate_is_two_qubit(g.g)) busy[g.q1] = t + 1;
        end = std::max(end, t + 1);
    }
    return end;
}

inline void append_prep_block(Circuit& c, std::size_t t, const std::array<std::size_t, 7>& wires,
                              std::size_t guard = kNoBit, bool guard_negate = false) {
    for (auto w : wires) {
        Location l = loc_simple(t, OpKind::Prep0, w);
        l.guard = guard;
        l.guard_negate = guard_negate;
        c.locations.push_back(l);
    }
}

inline std::size_t append_measure_block(Circuit& c, std::size_t t, const std::array<std::size_t, 7>& wires,
                                        std::array<std::size_t, 7>& bits_out) {
    for (std::size_t i = 0; i < 7; ++i) {
        Location l = loc_simple(t, OpKind::MeasureZ, wires[i]);
        l.c_out = c.alloc_bit();
        bits_out[i] = l.c_out;
        c.locations.push_back(l);
    }
    return t + 1;
}

inline void append_transversal(Circuit& c, std::size_t t, Gate g, const std::array<std::size_t, 7>& wires,
                               std::size_t guard = kNoBit, bool guard_negate = false) {
    for (auto w : wires) {
        Location l = loc_gate(t, g, w);
        l.guard = guard;
        l.guard_negate = guard_negate;
        c.locations.push_back(l);
    }
}

inline void append_transversal_cnot(Circuit& c, std::size_t t, const std::array<std::size_t, 7>& ctrl,
                                    const std::array<std::size_t, 7>& tgt, std::size_t guard = kNoBit,
                                    bool guard_negate = false) {
    for (std::size_t i = 0; i < 7; ++i) {
        Location l = loc_gate(t, Gate::CNOT, ctrl[i], tgt[i]);
        l.guard = guard;
        l.guard_negate = guard_negate;
        c.locations.push_back(l);
    }
}

// Hamming-corrected logical readout of a 7-bit measurement record.
inline void append_steane_readout(Circuit& c, std::size_t t, const SteaneContext& ctx,
                                  const std::array<std::size_t, 7>& meas_bits, std::size_t logical_out, int side) {
    int code_idx = c.add_code(ctx.code);
    std::size_t corr0 = c.alloc_bits(7);
    ClassicalStep s;
    s.t = t;
    s.kind = ClassicalKind::HammingSteane;
    s.code_idx = code_idx;
    s.side = side;
    for (auto b : meas_bits) s.in_bits.push_back(b);
    for (std::size_t i = 0; i < 7; ++i) s.out_bits.push_back(corr0 + i);
    s.wait_depth = 1;
    c.classical.push_back(s);
    ClassicalStep p;
    p.t = t;
    p.kind = ClassicalKind::Parity;
    const BitVec& supp = side == 0 ? ctx.code.logical_z[0].z : ctx.code.logical_x[0].x;
    for (auto q : supp.support()) p.in_bits.push_back(corr0 + q);
    p.out_bits = {logical_out};
    c.classical.push_back(p);
}

// Raw syndrome bits + logical parity of an uncorrected readout (verification
// wants detection, not correction). Returns 3 syndrome bits then the logical
// bit.
inline std::vector<std::size_t> append_detection_bits(Circuit& c, std::size_t t, const SteaneContext& ctx,
                                                      const std::array<std::size_t, 7>& meas_bits) {
    std::vector<std::size_t> flags;
    for (std::size_t r = 0; r < 3; ++r) {
        ClassicalStep s;
        s.t = t;
        s.kind = ClassicalKind::Parity;
        for (auto q : ctx.code.pcp.h_z.row(r).support()) s.in_bits.push_back(meas_bits[q]);
        std::size_t b = c.alloc_bit();
        s.out_bits = {b};
        c.classical.push_back(s);
        flags.push_back(b);
    }
    ClassicalStep p;
    p.t = t;
    p.kind = ClassicalKind::Parity;
    for (auto q : ctx.code.logical_z[0].z.support()) p.in_bits.push_back(meas_bits[q]);
    std::size_t lb = c.alloc_bit();
    p.out_bits = {lb};
    c.classical.push_back(p);
    flags.push_back(lb);
    return flags;
}

inline std::size_t combine_flags(Circuit& c, std::size_t t, const std::vector<std::size_t>& flags) {
    ClassicalStep s;
    s.t = t;
    s.kind = ClassicalKind::NotAllZero;
    s.in_bits = flags;
    std::size_t out = c.alloc_bit();
    s.out_bits = {out};
    c.classical.push_back(s);
    return out;
}

inline void cond_logical_pauli(Circuit& c, std::size_t t, const std::array<std::size_t, 7>& wires, std::size_t bx,
                               std::size_t bz) {
    // transversal X^7 / Z^7 are valid logical representatives
    for (std::size_t i = 0; i < 7; ++i) {
        Location corr;
        corr.t = t;
        corr.kind = OpKind::CondPauli;
        corr.qubits = {wires[i]};
        corr.bx = bx;
        corr.bz = bz;
        c.locations.push_back(corr);
    }
}

}  // namespace steane_detail

struct SteanePrepResult {
    std::size_t end_time;
    std::size_t fail_bit;
};

// Verified |0bar> preparation on `out`: encode `out` and an unverified
// stand-by on `spare` in parallel, copy `out` onto `ver` and read it out;
// pass iff all Z syndromes and the logical outcome are trivial, otherwise
// the stand-by is swapped in (its faults only matter on the failure
// branch, which is itself first order).
inline SteanePrepResult append_zero_prep(Circuit& c, std::size_t t0, const SteaneContext& ctx,
                                         const std::array<std::size_t, 7>& out, const std::array<std::size_t, 7>& ver,
                                         const std::array<std::size_t, 7>& spare) {
    using namespace steane_detail;
    append_prep_block(c, t0, out);
    append_prep_block(c, t0, ver);
    append_prep_block(c, t0, spare);
    std::size_t t1 = append_encoder(c, t0 + 1, ctx.enc, out);
    append_encoder(c, t0 + 1, ctx.enc, ver);
    append_encoder(c, t0 + 1, ctx.enc, spare);
    std::size_t t = t1;
    append_transversal_cnot(c, t, out, ver);
    std::array<std::size_t, 7> bits{};
    std::size_t tm = append_measure_block(c, t + 1, ver, bits);
    auto flags = append_detection_bits(c, tm, ctx, bits);
    std::size_t fail = combine_flags(c, tm, flags);
    for (std::size_t i = 0; i < 7; ++i) {
        Location l;
        l.t = tm + 1;
        l.kind = OpKind::FrameSelect;
        l.qubits = {out[i]};
        l.src = spare[i];
        l.guard = fail;
        c.locations.push_back(l);
    }
    return {tm + 2, fail};
}

// One-bit T teleportation: |T> ancilla controls a CNOT onto the data wire,
// the data wire is measured, corrections X^z then S^z act on the ancilla,
// and a swap returns the state to `data`. Tdg appends the trailing Sdg.
inline std::size_t append_t_teleport(Circuit& c, std::size_t t0, std::size_t data, std::size_t spare, bool dagger) {
    c.locations.push_back(loc_simple(t0, OpKind::PrepT, spare));
    c.locations.push_back(loc_gate(t0 + 1, Gate::CNOT, spare, data));
    Location m = loc_simple(t0 + 2, OpKind::MeasureZ, data);
    m.c_out = c.alloc_bit();
    c.locations.push_back(m);
    Location px;
    px.t = t0 + 3;
    px.kind = OpKind::CondPauli;
    px.qubits = {spare};
    px.bx = m.c_out;
    c.locations.push_back(px);
    Location ps;
    ps.t = t0 + 4;
    ps.kind = OpKind::CondClifford;
    ps.qubits = {spare};
    ps.bx = m.c_out;
    c.locations.push_back(ps);
    c.locations.push_back(loc_simple(t0 + 3, OpKind::Prep0, data));
    std::size_t t = t0 + 5;
    c.locations.push_back(loc_gate(t, Gate::CNOT, spare, data));
    c.locations.push_back(loc_gate(t + 1, Gate::CNOT, data, spare));
    c.locations.push_back(loc_gate(t + 2, Gate::CNOT, spare, data));
    t += 3;
    if (dagger) {
        c.locations.push_back(loc_gate(t, Gate::Sdg, data));
        ++t;
    }
    return t;
}

// Knill EC, split halves: `charge` prepares the two verified |0bar>
// ancillas in buffer `par` (blocks 6*par .. 6*par+5); `teleport` consumes
// them: Bell pair, transversal teleport, Hamming-decoded logical outcomes,
// conditional logical correction, swap back onto `block`.
inline std::size_t append_ec_charge(Circuit& c, std::size_t t0, const SteaneContext& ctx, const Bank& bank,
                                    std::size_t par) {
    std::size_t b = 6 * par;
    auto zp1 = append_zero_prep(c, t0, ctx, bank.aux_block(b + 0), bank.aux_block(b + 1), bank.aux_block(b + 2));
    auto zp2 = append_zero_prep(c, t0, ctx, bank.aux_block(b + 3), bank.aux_block(b + 4), bank.aux_block(b + 5));
    return std::max(zp1.end_time, zp2.end_time);
}

inline std::size_t append_ec_teleport(Circuit& c, std::size_t t, const SteaneContext& ctx, const Bank& bank,
                                      std::size_t par, const std::array<std::size_t, 7>& block) {
    using namespace steane_detail;
    auto a0 = bank.aux_block(6 * par + 0), a3 = bank.aux_block(6 * par + 3);
    append_transversal(c, t, Gate::H, a0);
    append_transversal_cnot(c, t + 1, a0, a3);
    append_transversal_cnot(c, t + 2, block, a0);
    append_transversal(c, t + 3, Gate::H, block);
    std::array<std::size_t, 7> bits_q{}, bits_a{};
    append_measure_block(c, t + 4, block, bits_q);
    std::size_t tm = append_measure_block(c, t + 4, a0, bits_a);
    std::size_t mx = c.alloc_bit(), mz = c.alloc_bit();
    append_steane_readout(c, tm, ctx, bits_q, mx, 1);
    append_steane_readout(c, tm, ctx, bits_a, mz, 0);
    cond_logical_pauli(c, tm + 1, a3, mz, mx);
    append_prep_block(c, tm + 1, block);
    append_transversal_cnot(c, tm + 2, a3, block);
    append_transversal_cnot(c, tm + 3, block, a3);
    append_transversal_cnot(c, tm + 4, a3, block);
    return tm + 5;
}

inline std::size_t append_knill_ec(Circuit& c, std::size_t t0, const SteaneContext& ctx, const Bank& bank,
                                   const std::array<std::size_t, 7>& block) {
    std::size_t t = append_ec_charge(c, t0, ctx, bank, 0);
    return append_ec_teleport(c, t, ctx, bank, 0, block);
}

struct SteaneTPrepResult {
    std::size_t end_time;
    std::size_t fail_bit;
};

// Verified |Tbar> preparation on `out`. Encode |T>|0^6>, measure the
// logical TXTdg stabilizer through ancilla A with flag B (per-qubit
// controlled-SdgX decomposed over {T, Tdg, CNOT}; the seven dropped A-side
// phase factors compose to exactly the Hermitizing phase of logical TXTdg),
// then error-detect both error types by copying onto two sequential encoded
// ancillas: a |0bar> copy read in Z (X-type damage, including logical X)
// and a |+bar> copy read in X (Z-type damage). Pass iff m_A = m_B = 0 and
// all detection bits are trivial; on failure re-encode unverified on the
// freed ancilla wires and swap in. Sequential detection keeps at most 16
// wires alive, so the level-1 gadget fits the dense reference.
inline SteaneTPrepResult append_t_prep(Circuit& c, std::size_t t0, const SteaneContext& ctx, const Bank& bank,
                                       const std::array<std::size_t, 7>& out) {
    using namespace steane_detail;
    auto a0 = bank.aux_block(12), a1 = bank.aux_block(13);
    std::size_t a = bank.single(0), b = bank.single(1);

    c.locations.push_back(loc_simple(t0, OpKind::PrepT, out[0]));
    for (std::size_t i = 1; i < 7; ++i) c.locations.push_back(loc_simple(t0, OpKind::Prep0, out[i]));
    std::size_t t = append_encoder(c, t0 + 1, ctx.enc, out);

    // (ii) logical TXTdg measurement with flag
    c.locations.push_back(loc_simple(t, OpKind::Prep0, a));
    c.locations.push_back(loc_simple(t, OpKind::Prep0, b));
    c.locations.push_back(loc_gate(t + 1, Gate::H, a));
    c.locations.push_back(loc_gate(t + 2, Gate::CNOT, a, b));  // flag hook 1
    t += 3;
    for (std::size_t q = 0; q < 7; ++q) {
        c.locations.push_back(loc_gate(t++, Gate::CNOT, a, out[q]));
        c.locations.push_back(loc_gate(t++, Gate::Tdg, out[q]));
        c.locations.push_back(loc_gate(t++, Gate::CNOT, a, out[q]));
        c.locations.push_back(loc_gate(t++, Gate::T, out[q]));
        c.locations.push_back(loc_gate(t++, Gate::CNOT, a, out[q]));
    }
    c.locations.push_back(loc_gate(t, Gate::CNOT, a, b));  // flag hook 2
    c.locations.push_back(loc_gate(t + 1, Gate::H, a));
    Location ma = loc_simple(t + 2, OpKind::MeasureZ, a);
    ma.c_out = c.alloc_bit();
    c.locations.push_back(ma);
    Location mb = loc_simple(t + 2, OpKind::MeasureZ, b);
    mb.c_out = c.alloc_bit();
    c.locations.push_back(mb);
    t += 3;

    // (iii) X-type detection: |+bar> ancilla takes a copy of the block's X
    // content and is read in the Z basis (a |0bar> ancilla here would pin
    // the block's logical Z and collapse |Tbar>)
    append_prep_block(c, t, a0);
    c.locations.push_back(loc_gate(t + 1, Gate::H, a0[0]));
    std::size_t tx = append_encoder(c, t + 2, ctx.enc, a0);
    append_transversal_cnot(c, tx, out, a0);
    std::array<std::size_t, 7> bits_x{};
    std::size_t tmx = append_measure_block(c, tx + 1, a0, bits_x);
    auto fx = append_detection_bits(c, tmx, ctx, bits_x);

    // (iv) Z-type detection: |0bar> ancilla picks up the block's Z content
    // through the control side and is read in the X basis (a |+bar> ancilla
    // here would pin the block's logical X)
    append_prep_block(c, tmx, a1);
    std::size_t tz = append_encoder(c, tmx + 1, ctx.enc, a1);
    append_transversal_cnot(c, tz, a1, out);
    append_transversal(c, tz + 1, Gate::H, a1);
    std::array<std::size_t, 7> bits_z{};
    std::size_t tmz = append_measure_block(c, tz + 2, a1, bits_z);
    auto fz = append_detection_bits(c, tmz, ctx, bits_z);

    // syndromes only on both sides: the logical parities are intrinsically
    // random on |Tbar>, and distance 3 keeps syndrome-free logicals out of
    // reach of single faults
    std::vector<std::size_t> flags = {ma.c_out, mb.c_out};
    for (std::size_t i = 0; i + 1 < fx.size(); ++i) flags.push_back(fx[i]);
    for (std::size_t i = 0; i + 1 < fz.size(); ++i) flags.push_back(fz[i]);
    std::size_t fail = combine_flags(c, tmz, flags);

    // retry: unverified re-encode on the freed a1 wires, swap in on failure
    Location rp = loc_simple(tmz + 1, OpKind::PrepT, a1[0]);
    rp.guard = fail;
    c.locations.push_back(rp);
    for (std::size_t i = 1; i < 7; ++i) {
        Location l = loc_simple(tmz + 1, OpKind::Prep0, a1[i]);
        l.guard = fail;
        c.locations.push_back(l);
    }
    std::size_t t_re = append_encoder(c, tmz + 2, ctx.enc, a1, fail, false);
    for (std::size_t i = 0; i < 7; ++i) {
        Location sel;
        sel.t = t_re;
        sel.kind = OpKind::FrameSelect;
        sel.qubits = {out[i]};
        sel.src = a1[i];
        sel.guard = fail;
        c.locations.push_back(sel);
    }
    return {t_re + 1, fail};
}

// Decoding gadget: teleports the logical state of `block` onto the single
// wire `out_phys` through a Bell resource with one encoded half.
inline std::size_t append_decoding_gadget(Circuit& c, std::size_t t0, const SteaneContext& ctx, const Bank& bank,
                                          const std::array<std::size_t, 7>& block, std::size_t out_phys) {
    using namespace steane_detail;
    auto res = bank.aux_block(12);
    c.locations.push_back(loc_simple(t0, OpKind::Prep0, out_phys));
    append_prep_block(c, t0, res);
    c.locations.push_back(loc_gate(t0 + 1, Gate::H, out_phys));
    c.locations.push_back(loc_gate(t0 + 2, Gate::CNOT, out_phys, res[0]));
    std::size_t t = append_encoder(c, t0 + 3, ctx.enc, res);
    append_transversal_cnot(c, t, block, res);
    append_transversal(c, t + 1, Gate::H, block);
    std::array<std::size_t, 7> bits_q{}, bits_r{};
    append_measure_block(c, t + 2, block, bits_q);
    std::size_t tm = append_measure_block(c, t + 2, res, bits_r);
    std::size_t mx = c.alloc_bit(), mz = c.alloc_bit();
    append_steane_readout(c, tm, ctx, bits_q, mx, 1);
    append_steane_readout(c, tm, ctx, bits_r, mz, 0);
    Location corr;
    corr.t = tm + 1;
    corr.kind = OpKind::CondPauli;
    corr.qubits = {out_phys};
    corr.bx = mz;
    corr.bz = mx;
    c.locations.push_back(corr);
    return tm + 2;
}

// --- level compiler --------------------------------------------------------

struct LevelCompileResult {
    Circuit circuit;
    // for open circuits: the level-(l-1) wire carrying each decoded level-l
    // wire (identity map when no decoding happened)
    std::vector<std::size_t> output_wires;
};

// Rewrite T/Tdg gates into teleport sequences on the same wires, using the
// bank spare of the wire's bank.
inline Circuit expand_t_gates(const Circuit& c) {
    Circuit out = c;
    out.locations.clear();
    // serialize: every location keeps its slice, T expansions get a private
    // time window after the slice it sat in; simplest correct scheme: give
    // each original time step a stretch factor equal to the worst T cost
    const std::size_t t_cost = 10;
    bool any_t = false;
    for (const auto& l : c.locations)
        if (l.kind == OpKind::Gate && (l.gate == Gate::T || l.gate == Gate::Tdg)) any_t = true;
    if (!any_t) return c;
    for (const auto& l : c.locations) {
        if (l.kind == OpKind::Gate && (l.gate == Gate::T || l.gate == Gate::Tdg)) {
            std::size_t bank_base = (l.qubits[0] / kBank) * kBank;
            Bank bank{bank_base};
            Circuit tmp;
            tmp.width = out.width;
            tmp.num_bits = out.num_bits;
            append_t_teleport(tmp, l.t * t_cost, l.qubits[0], bank.single(2), l.gate == Gate::Tdg);
            for (auto loc : tmp.locations) {
                loc.guard = l.guard;
                loc.guard_negate = l.guard_negate;
                out.locations.push_back(loc);
            }
            out.num_bits = tmp.num_bits;
        } else {
            Location loc = l;
            loc.t = l.t * t_cost;
            out.locations.push_back(loc);
        }
    }
    for (auto& s : out.classical) s.t *= t_cost;
    out.finalize();
    return out;
}

// One level of compilation: each wire gets a bank; every elementary op is
// replaced by its gadget followed by Knill EC on each touched block
// (measurements excepted). EC ancillas are double-buffered: the buffer for
// slice k charges during slice k-1, so data blocks idle only while the
// teleport half runs. Emitted locations carry tag = 2*slice (gadget phase)
// or 2*slice+1 (the EC consuming slice's charge + teleport), usable as
// noise-window masks. Decoding gadgets are appended for open circuits.
inline LevelCompileResult compile_level_down(const Circuit& c_in) {
    Circuit c = expand_t_gates(c_in);
    Circuit out;
    out.width = c.width * kBank;
    out.num_bits = c.num_bits;
    out.open_circuit = c.open_circuit;
    out.code_table = c.code_table;
    out.clifford_table = c.clifford_table;
    const SteaneContext& ctx = SteaneContext::instance();

    auto bank_of = [&](std::size_t w) { return Bank{w * kBank}; };

    std::map<std::size_t, std::vector<const Location*>> slices;
    for (const auto& l : c.locations) slices[l.t].push_back(&l);
    std::map<std::size_t, std::vector<const ClassicalStep*>> csteps;
    for (const auto& s : c.classical) csteps[s.t].push_back(&s);

    std::vector<bool> live(c.width, false);
    std::vector<std::size_t> charge_ready(c.width, 0);  // buffer for the NEXT ec
    std::vector<uint8_t> parity(c.width, 0);
    std::size_t t_out = 0;
    std::size_t max_t = 0;
    for (const auto& l : c.locations) max_t = std::max(max_t, l.t);
    for (const auto& s : c.classical) max_t = std::max(max_t, s.t);

    auto stamp = [&](std::size_t from, int tag, std::size_t guard, bool neg) {
        for (std::size_t i = from; i < out.locations.size(); ++i) {
            if (tag < 0)
                out.locations[i].tag = tag;  // window markers propagate down
            else if (out.locations[i].tag == 0)
                out.locations[i].tag = tag;
            if (guard != kNoBit && out.locations[i].guard == kNoBit) {
                out.locations[i].guard = guard;
                out.locations[i].guard_negate = neg;
            }
        }
    };

    for (std::size_t t = 0; t <= max_t; ++t) {
        int gtag = int(2 * t + 2);       // gadget phase of slice t (0 stays "untagged")
        int etag = int(2 * t + 3);       // EC consuming phase
        std::size_t slice_end = t_out;
        std::vector<std::size_t> ec_wires;
        std::map<std::size_t, int> wire_mark;
        auto it = slices.find(t);
        if (it != slices.end()) {
            for (const Location* lp : it->second) {
                const Location& l = *lp;
                Bank b0 = bank_of(l.qubits[0]);
                std::size_t emitted_from = out.locations.size();
                switch (l.kind) {
                    case OpKind::Prep0: {
                        auto r = append_zero_prep(out, t_out, ctx, b0.data(), b0.aux_block(12), b0.aux_block(13));
                        slice_end = std::max(slice_end, r.end_time);
                        live[l.qubits[0]] = true;
                        ec_wires.push_back(l.qubits[0]);
                        break;
                    }
                    case OpKind::PrepT: {
                        auto r = append_t_prep(out, t_out, ctx, b0, b0.data());
                        slice_end = std::max(slice_end, r.end_time);
                        live[l.qubits[0]] = true;
                        ec_wires.push_back(l.qubits[0]);
                        break;
                    }
                    case OpKind::Gate: {
                        Gate g = l.gate;
                        if (g == Gate::T || g == Gate::Tdg) throw std::logic_error("level compile: unexpanded T");
                        if (g == Gate::CZ) throw std::logic_error("level compile: CZ must be rewritten before compiling");
                        if (gate_is_two_qubit(g)) {
                            Bank b1 = bank_of(l.qubits[1]);
                            steane_detail::append_transversal_cnot(out, t_out, b0.data(), b1.data(), l.guard,
                                                                   l.guard_negate);
                            slice_end = std::max(slice_end, t_out + 1);
                            ec_wires.push_back(l.qubits[0]);
                            ec_wires.push_back(l.qubits[1]);
                        } else {
                            Gate phys = g;
                            if (g == Gate::S)
                                phys = Gate::Sdg;  // transversal Sdg implements logical S
                            else if (g == Gate::Sdg)
                                phys = Gate::S;
                            steane_detail::append_transversal(out, t_out, phys, b0.data(), l.guard, l.guard_negate);
                            slice_end = std::max(slice_end, t_out + 1);
                            ec_wires.push_back(l.qubits[0]);
                        }
                        break;
                    }
                    case OpKind::Wait:
                    case OpKind::GadgetBegin:
                    case OpKind::GadgetEnd:
                        if (l.kind == OpKind::Wait && live[l.qubits[0]]) ec_wires.push_back(l.qubits[0]);
                        break;
                    case OpKind::MeasureZ: {
                        std::array<std::size_t, 7> bits{};
                        std::size_t tm = steane_detail::append_measure_block(out, t_out, b0.data(), bits);
                        steane_detail::append_steane_readout(out, tm, ctx, bits, l.c_out, 0);
                        slice_end = std::max(slice_end, tm + 1);
                        live[l.qubits[0]] = false;
                        break;
                    }
                    case OpKind::CondPauli: {
                        for (std::size_t i = 0; i < 7; ++i) {
                            Location cp;
                            cp.t = t_out;
                            cp.kind = OpKind::CondPauli;
                            cp.qubits = {b0.data()[i]};
                            cp.bx = l.bx;
                            cp.bz = l.bz;
                            cp.guard = l.guard;
                            cp.guard_negate = l.guard_negate;
                            out.locations.push_back(cp);
                        }
                        slice_end = std::max(slice_end, t_out + 1);
                        ec_wires.push_back(l.qubits[0]);
                        break;
                    }
                    case OpKind::CondClifford: {
                        for (std::size_t i = 0; i < 7; ++i) {
                            Location cp;
                            cp.t = t_out;
                            cp.kind = OpKind::CondClifford;
                            cp.qubits = {b0.data()[i]};
                            cp.bx = l.bx;
                            cp.tag = l.tag < 0 ? +1 : -1;  // logical S = transversal Sdg
                            cp.guard = l.guard;
                            cp.guard_negate = l.guard_negate;
                            out.locations.push_back(cp);
                        }
                        slice_end = std::max(slice_end, t_out + 1);
                        ec_wires.push_back(l.qubits[0]);
                        break;
                    }
                    case OpKind::FrameSelect: {
                        Bank b1 = bank_of(l.src);
                        for (std::size_t i = 0; i < 7; ++i) {
                            Location sel;
                            sel.t = t_out;
                            sel.kind = OpKind::FrameSelect;
                            sel.qubits = {b0.data()[i]};
                            sel.src = b1.data()[i];
                            sel.guard = l.guard;
                            sel.guard_negate = l.guard_negate;
                            out.locations.push_back(sel);
                        }
                        slice_end = std::max(slice_end, t_out + 1);
                        break;
                    }
                    default:
                        throw std::invalid_argument("level compile: register-level op");
                }
                stamp(emitted_from, l.tag < 0 ? l.tag : gtag, l.guard, l.guard_negate);
                for (auto q : l.qubits) wire_mark[q] = l.tag;
            }
        }
        // EC phase: teleport through the buffer charged during the previous
        // slice; concurrently charge the other buffer for the next slice
        if (!ec_wires.empty()) {
            std::sort(ec_wires.begin(), ec_wires.end());
            ec_wires.erase(std::unique(ec_wires.begin(), ec_wires.end()), ec_wires.end());
            std::size_t ec_end = slice_end;
            for (auto w : ec_wires) {
                Bank b = bank_of(w);
                int mark = wire_mark.count(w) ? wire_mark[w] : 0;
                std::size_t from = out.locations.size();
                if (charge_ready[w] == 0) {
                    // prologue: no buffer charged yet for this wire
                    charge_ready[w] = append_ec_charge(out, t_out, ctx, b, parity[w]);
                }
                std::size_t t_tel = std::max(slice_end, charge_ready[w]);
                std::size_t tel_end = append_ec_teleport(out, t_tel, ctx, b, parity[w], b.data());
                stamp(from, mark < 0 ? mark : etag, kNoBit, false);
                // charge the other buffer toward the next slice's EC; window
                // marks attribute it to the current slice (boundary charges
                // are a negligible misattribution)
                std::size_t from2 = out.locations.size();
                parity[w] ^= 1;
                charge_ready[w] = append_ec_charge(out, t_tel, ctx, b, parity[w]);
                stamp(from2, mark < 0 ? mark : etag + 2, kNoBit, false);
                ec_end = std::max(ec_end, tel_end);
            }
            slice_end = ec_end;
        }
        auto cit = csteps.find(t);
        if (cit != csteps.end())
            for (const ClassicalStep* sp : cit->second) {
                ClassicalStep s = *sp;
                s.t = slice_end;
                out.classical.push_back(s);
            }
        if (slice_end == t_out) slice_end = t_out + 1;
        t_out = slice_end;
    }

    LevelCompileResult res;
    res.output_wires.resize(c.width);
    for (std::size_t w = 0; w < c.width; ++w) res.output_wires[w] = w * kBank;
    if (c.open_circuit) {
        std::size_t t_dec = t_out;
        std::size_t end = t_dec;
        for (std::size_t w = 0; w < c.width; ++w) {
            if (!live[w]) continue;
            Bank b = bank_of(w);
            end = std::max(end, append_decoding_gadget(out, t_dec, ctx, b, b.data(), b.single(3)));
            res.output_wires[w] = b.single(3);
        }
        t_out = end;
    }
    out.finalize();
    // explicit waits wherever a wire is allocated but idle for a step
    // (waits are fault locations; deallocated intervals carry none)
    {
        std::map<std::size_t, std::vector<std::pair<std::size_t, const Location*>>> per_wire;
        for (const auto& l : out.locations)
            for (auto q : l.qubits) per_wire[q].push_back({l.t, &l});
        std::vector<Location> pads;
        for (auto& [q, ls] : per_wire) {
            std::stable_sort(ls.begin(), ls.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            bool alive = false;
            std::size_t prev_t = 0;
            for (const auto& [t, lp] : ls) {
                if (alive && t > prev_t + 1)
                    for (std::size_t tt = prev_t + 1; tt < t; ++tt) pads.push_back(loc_simple(tt, OpKind::Wait, q));
                if (lp->kind == OpKind::Prep0 || lp->kind == OpKind::PrepT)
                    alive = true;
                else if (lp->kind == OpKind::MeasureZ)
                    alive = false;
                prev_t = t;
            }
        }
        for (auto& p : pads) out.locations.push_back(std::move(p));
        out.finalize();
    }
    res.circuit = std::move(out);
    return res;
}

// Full compilation to the physical level.
inline LevelCompileResult steane_compile(const Circuit& level_l, std::size_t levels) {
    LevelCompileResult res;
    res.circuit = level_l;
    res.output_wires.resize(level_l.width);
    for (std::size_t w = 0; w < level_l.width; ++w) res.output_wires[w] = w;
    for (std::size_t l = 0; l < levels; ++l) {
        auto step = compile_level_down(res.circuit);
        for (auto& w : res.output_wires) w = step.output_wires[w];
        res.circuit = std::move(step.circuit);
    }
    return res;
}

}  // namespace ftqc
