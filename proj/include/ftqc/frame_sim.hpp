#pragma once

// Pauli-frame Monte Carlo over physical circuits. A noiseless fiducial
// execution fixes the reference outcomes; each trial samples a fault set,
// propagates the frame through Clifford locations, flips recorded bits
// where the frame or a measurement fault dictates, and re-evaluates the
// classical steps on the trial bits. Conditional Pauli corrections enter
// the frame as trial-vs-fiducial differences; a diverging conditional
// Clifford is a heralded non-Pauli event (a conservative failure class).
// |T>-state payloads are ideal resources; the fiducial stands them in by
// |+> so the Clifford reference stays exact for frame purposes.
//
// The location/classical stream is precompiled into a flat array so the
// per-trial inner loop is branch-light; trials reuse a caller workspace.

#include "ftqc/exec.hpp"
#include "ftqc/noise.hpp"

namespace ftqc {

struct Fiducial {
    std::vector<uint8_t> bits;
    Circuit stand_in;
};

inline Fiducial make_fiducial(const Circuit& c, uint64_t seed) {
    Fiducial f;
    f.stand_in = c;
    for (auto& l : f.stand_in.locations) {
        if (l.kind == OpKind::PrepT) {
            l.kind = OpKind::Prep0;
            Location h = loc_gate(l.t, Gate::H, l.qubits[0]);
            h.tag = -77;
            h.guard = l.guard;
            h.guard_negate = l.guard_negate;
            f.stand_in.locations.push_back(h);
        }
    }
    f.stand_in.finalize();
    auto rng = make_rng(seed, 0xf1d);
    RunOptions opt;
    opt.rng = &rng;
    auto res = ref_execute(f.stand_in, opt);
    if (res.impossible || res.branch_exhausted) throw std::logic_error("fiducial: reference run failed");
    f.bits = std::move(res.bits);
    return f;
}

struct FrameTrialResult {
    const std::vector<uint8_t>* bits = nullptr;  // trial bit values (workspace-owned)
    const BitVec* frame_x = nullptr;
    const BitVec* frame_z = nullptr;
    bool heralded_non_pauli = false;
    std::size_t fault_count = 0;
};

class FrameSim {
  public:
    struct Workspace {
        std::vector<uint8_t> bits;
        BitVec frame_x, frame_z;
        std::vector<std::size_t> fault_locs;
    };

    explicit FrameSim(Circuit c, uint64_t fiducial_seed = 1) : circ_(std::move(c)), fid_(make_fiducial(circ_, fiducial_seed)) {
        compile_stream();
    }

    const Fiducial& fiducial() const { return fid_; }
    const Circuit& circuit() const { return circ_; }
    std::size_t num_fault_locations() const { return num_fault_locs_; }

    // Restrict sampled faults to location indices [lo, hi) of the real
    // (fault-addressable) location stream.
    void set_noise_window(std::size_t lo, std::size_t hi) {
        win_lo_ = lo;
        win_hi_ = hi;
    }
    std::pair<std::size_t, std::size_t> noise_window() const { return {win_lo_, win_hi_}; }

    // Restrict sampled faults to location indices where mask is true.
    void set_noise_mask(std::vector<uint8_t> mask) { mask_ = std::move(mask); }

    // Fault index of the first real location at time >= t.
    std::size_t fault_index_at_time(std::size_t t) const {
        for (const auto& op : stream_)
            if (op.kind != kClassical && op.fault_index != kNoIdx && op.t >= t) return op.fault_index;
        return num_fault_locs_;
    }

    // Source tag of each fault-addressable location (the level compiler
    // stamps slice/phase ids there).
    std::vector<int> fault_tags() const {
        std::vector<int> tags(num_fault_locs_, 0);
        std::size_t li = 0, fi = 0;
        for (const auto& l : fid_.stand_in.locations) {
            (void)li;
            if (l.tag == -77) continue;
            if (l.kind == OpKind::GadgetBegin || l.kind == OpKind::GadgetEnd) continue;
            if (l.kind == OpKind::CondClifford || l.kind == OpKind::FrameSelect) continue;
            if (fi < tags.size()) tags[fi++] = l.tag;
        }
        return tags;
    }

    FrameTrialResult trial(const NoiseSpec& spec, uint64_t trial_index, Workspace& ws,
                           const std::vector<std::pair<std::size_t, PauliWord>>* injections = nullptr) const {
        const Circuit& c = fid_.stand_in;
        auto rng = make_rng(spec.seed, trial_index);
        FrameTrialResult out;
        ws.bits.assign(std::max<std::size_t>(c.num_bits, 1), 0);
        if (ws.frame_x.size() != c.width) {
            ws.frame_x = BitVec(c.width);
            ws.frame_z = BitVec(c.width);
        } else {
            for (std::size_t q = 0; q < c.width; ++q) {
                ws.frame_x.set(q, false);
                ws.frame_z.set(q, false);
            }
        }
        ws.fault_locs.clear();

        std::size_t lo = std::max<std::size_t>(win_lo_, 0), hi = std::min(win_hi_, num_fault_locs_);
        if (spec.uniform() && spec.p_loc > 0.0 && hi > lo) {
            std::size_t loc = lo;
            while (true) {
                uint64_t gap = geometric_skip(rng, spec.p_loc);
                if (gap == ~0ull || loc + gap >= hi) break;
                loc += gap;
                if (mask_.empty() || mask_[loc]) ws.fault_locs.push_back(loc);
                ++loc;
            }
        } else if (!spec.uniform()) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (std::size_t l = lo; l < hi; ++l)
                if (u(rng) < spec.p_at(l) && (mask_.empty() || mask_[l])) ws.fault_locs.push_back(l);
        }
        out.fault_count = ws.fault_locs.size();
        std::size_t next_fault = 0;

        const std::vector<std::pair<std::size_t, PauliWord>>* inj = injections;
        std::size_t inj_next = 0;

        BitVec& fx = ws.frame_x;
        BitVec& fz = ws.frame_z;
        std::vector<uint8_t>& bits = ws.bits;

        for (const auto& op : stream_) {
            if (op.kind == kClassical) {
                eval_classical(c, c.classical[op.q0], bits);
                continue;
            }
            bool fid_exec = true, tri_exec = true;
            if (op.guard != kNoIdx) {
                bool fg = fid_.bits[op.guard] != 0, tg = bits[op.guard] != 0;
                if (op.neg) {
                    fg = !fg;
                    tg = !tg;
                }
                fid_exec = fg;
                tri_exec = tg;
            }
            bool faulty = false;
            if (op.fault_index != kNoIdx) {
                if (next_fault < ws.fault_locs.size() && ws.fault_locs[next_fault] == op.fault_index) {
                    ++next_fault;
                    faulty = tri_exec;
                }
            }
            if (tri_exec) {
                switch (op.kind) {
                    case kPrep:
                        fx.set(op.q0, false);
                        fz.set(op.q0, false);
                        break;
                    case kH: {
                        bool x = fx.get(op.q0), z = fz.get(op.q0);
                        fx.set(op.q0, z);
                        fz.set(op.q0, x);
                        break;
                    }
                    case kS:
                        if (fx.get(op.q0)) fz.flip(op.q0);
                        break;
                    case kCnot:
                        if (fx.get(op.q0)) fx.flip(op.q1);
                        if (fz.get(op.q1)) fz.flip(op.q0);
                        break;
                    case kCz:
                        if (fx.get(op.q0)) fz.flip(op.q1);
                        if (fx.get(op.q1)) fz.flip(op.q0);
                        break;
                    case kNoFrame:
                        break;
                    case kCondPauli: {
                        if (op.bx != kNoIdx && (uint8_t(fid_exec ? fid_.bits[op.bx] : 0) != bits[op.bx])) fx.flip(op.q0);
                        if (op.bz != kNoIdx && (uint8_t(fid_exec ? fid_.bits[op.bz] : 0) != bits[op.bz])) fz.flip(op.q0);
                        break;
                    }
                    case kCondCliff: {
                        uint8_t fb = uint8_t(fid_exec ? fid_.bits[op.bx] : 0);
                        if (fb != bits[op.bx])
                            out.heralded_non_pauli = true;
                        else if (fb) {
                            if (fx.get(op.q0)) fz.flip(op.q0);
                        }
                        break;
                    }
                    case kSelect: {
                        bool xb = fx.get(op.q0), zb = fz.get(op.q0);
                        fx.set(op.q0, fx.get(op.q1));
                        fz.set(op.q0, fz.get(op.q1));
                        fx.set(op.q1, xb);
                        fz.set(op.q1, zb);
                        break;
                    }
                    case kMeas: {
                        bool fid_out = fid_exec && fid_.bits[op.bx];
                        bool flip = fx.get(op.q0);
                        if (faulty) flip = !flip;
                        bits[op.bx] = uint8_t(fid_out ^ flip);
                        fx.set(op.q0, false);
                        fz.set(op.q0, false);
                        faulty = false;
                        break;
                    }
                    default:
                        break;
                }
            } else if (fid_exec && op.kind == kMeas) {
                bits[op.bx] = 0;
            }
            if (faulty && op.kind != kMeas) {
                auto p = random_nontrivial_pauli(op.q1 == kNoIdx ? 1 : 2, rng);
                if (p.x.get(0)) fx.flip(op.q0);
                if (p.z.get(0)) fz.flip(op.q0);
                if (op.q1 != kNoIdx && p.n > 1) {
                    if (p.x.get(1)) fx.flip(op.q1);
                    if (p.z.get(1)) fz.flip(op.q1);
                }
            }
            if (inj) {
                while (inj_next < inj->size() && (*inj)[inj_next].first == op.fault_index && op.fault_index != kNoIdx) {
                    const PauliWord& p = (*inj)[inj_next].second;
                    if (tri_exec) {
                        if (p.x.get(0)) fx.flip(op.q0);
                        if (p.z.get(0)) fz.flip(op.q0);
                        if (op.q1 != kNoIdx && p.n > 1) {
                            if (p.x.get(1)) fx.flip(op.q1);
                            if (p.z.get(1)) fz.flip(op.q1);
                        }
                    }
                    ++inj_next;
                }
            }
        }
        out.bits = &ws.bits;
        out.frame_x = &fx;
        out.frame_z = &fz;
        return out;
    }

  private:
    static constexpr uint32_t kNoIdx = ~uint32_t(0);
    enum Kind : uint8_t { kPrep, kH, kS, kCnot, kCz, kNoFrame, kCondPauli, kCondCliff, kSelect, kMeas, kClassical };

    struct PackedOp {
        Kind kind;
        uint8_t neg = 0;
        uint32_t q0 = kNoIdx, q1 = kNoIdx;
        uint32_t bx = kNoIdx, bz = kNoIdx;  // for kMeas, bx = c_out
        uint32_t guard = kNoIdx;
        uint32_t fault_index = kNoIdx;
        uint32_t t = 0;
    };

    Circuit circ_;
    Fiducial fid_;
    std::vector<PackedOp> stream_;
    std::size_t num_fault_locs_ = 0;
    std::size_t win_lo_ = 0, win_hi_ = ~std::size_t(0);
    std::vector<uint8_t> mask_;

    void compile_stream() {
        const Circuit& c = fid_.stand_in;
        stream_.clear();
        std::size_t li = 0, ci = 0, fault = 0;
        while (li < c.locations.size() || ci < c.classical.size()) {
            bool take_loc;
            if (li == c.locations.size())
                take_loc = false;
            else if (ci == c.classical.size())
                take_loc = true;
            else
                take_loc = c.locations[li].t <= c.classical[ci].t;
            if (!take_loc) {
                PackedOp op;
                op.kind = kClassical;
                op.q0 = uint32_t(ci);
                stream_.push_back(op);
                ++ci;
                continue;
            }
            const Location& l = c.locations[li++];
            if (l.tag == -77) continue;  // fiducial-only stand-in
            PackedOp op;
            op.t = uint32_t(l.t);
            op.guard = l.guard == kNoBit ? kNoIdx : uint32_t(l.guard);
            op.neg = l.guard_negate;
            op.q0 = l.qubits.empty() ? kNoIdx : uint32_t(l.qubits[0]);
            switch (l.kind) {
                case OpKind::Prep0:
                case OpKind::PrepT:
                    op.kind = kPrep;
                    break;
                case OpKind::Wait:
                    op.kind = kNoFrame;
                    break;
                case OpKind::GadgetBegin:
                case OpKind::GadgetEnd:
                    continue;  // markers carry no fault location
                case OpKind::Gate:
                    switch (l.gate) {
                        case Gate::H: op.kind = kH; break;
                        case Gate::S:
                        case Gate::Sdg: op.kind = kS; break;
                        case Gate::CNOT:
                            op.kind = kCnot;
                            op.q1 = uint32_t(l.qubits[1]);
                            break;
                        case Gate::CZ:
                            op.kind = kCz;
                            op.q1 = uint32_t(l.qubits[1]);
                            break;
                        case Gate::T:
                        case Gate::Tdg:
                            throw std::invalid_argument("frame sim: literal T in physical circuit");
                        default: op.kind = kNoFrame; break;  // Paulis
                    }
                    break;
                case OpKind::CondPauli:
                    op.kind = kCondPauli;
                    op.bx = l.bx == kNoBit ? kNoIdx : uint32_t(l.bx);
                    op.bz = l.bz == kNoBit ? kNoIdx : uint32_t(l.bz);
                    break;
                case OpKind::CondClifford:
                    op.kind = kCondCliff;
                    op.bx = uint32_t(l.bx);
                    break;
                case OpKind::FrameSelect:
                    op.kind = kSelect;
                    op.q1 = uint32_t(l.src);
                    break;
                case OpKind::MeasureZ:
                    op.kind = kMeas;
                    op.bx = uint32_t(l.c_out);
                    break;
                default:
                    throw std::invalid_argument("frame sim: register-level op");
            }
            // conditional corrections and selects are classical control, not
            // fault locations of the physical model; everything else is
            bool is_fault_loc =
                op.kind == kPrep || op.kind == kH || op.kind == kS || op.kind == kCnot || op.kind == kCz ||
                op.kind == kNoFrame || op.kind == kMeas || op.kind == kCondPauli;
            if (is_fault_loc) op.fault_index = uint32_t(fault++);
            stream_.push_back(op);
        }
        num_fault_locs_ = fault;
    }
};

// Logical bit of a frame side over the bank layout produced by the level
// compiler: a level-l wire rooted at `base` has its 7 children at
// base + i * kBank^{l-1} ... with the bank constant supplied by the caller.
inline bool steane_frame_logical_banked(const BitVec& side_bits, std::size_t level, const CssCode& steane_code,
                                        std::size_t base, std::size_t bank) {
    if (level == 0) return side_bits.get(base);
    std::size_t child = 1;
    for (std::size_t i = 1; i < level; ++i) child *= bank;
    std::array<bool, 7> c{};
    for (std::size_t b = 0; b < 7; ++b)
        c[b] = steane_frame_logical_banked(side_bits, level - 1, steane_code, base + b * child, bank);
    const BitMat& h = steane_code.pcp.h_x;
    std::array<bool, 3> syn{};
    for (std::size_t r = 0; r < 3; ++r) {
        bool s = false;
        for (auto q : h.row(r).support()) s ^= c[q];
        syn[r] = s;
    }
    auto pos = hamming_decode(syn);
    if (pos) c[*pos - 1] = !c[*pos - 1];
    bool logical = false;
    for (auto q : steane_code.logical_z[0].z.support()) logical ^= c[q];
    return logical;
}

}  // namespace ftqc
