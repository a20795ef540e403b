#pragma once

// Circuit executors. RefExec runs Clifford circuits (with classical steps,
// guards and conditional corrections) on the stabilizer tableau; DenseExec
// runs small circuits with T gates on the dense engine. Both support
// forced-outcome branches, which powers exact output-distribution
// enumeration for the reference oracles.

#include <functional>
#include <map>

#include "ftqc/circuit.hpp"
#include "ftqc/decoders.hpp"
#include "ftqc/dense_sim.hpp"
#include "ftqc/tableau_sim.hpp"

namespace ftqc {

inline const CssCode& step_code(const Circuit& c, const ClassicalStep& s) {
    static const CssCode steane_code = steane();
    if (s.code_idx < 0) return steane_code;
    return c.code_table[std::size_t(s.code_idx)];
}

// Evaluate one classical step on the bit register.
inline void eval_classical(const Circuit& c, const ClassicalStep& s, std::vector<uint8_t>& bits) {
    if (s.guard != kNoBit) {
        bool g = bits[s.guard];
        if (s.guard_negate) g = !g;
        if (!g) return;
    }
    auto in = [&](std::size_t i) { return bits[s.in_bits[i]] != 0; };
    switch (s.kind) {
        case ClassicalKind::Parity: {
            uint8_t acc = 0;
            for (auto b : s.in_bits) acc ^= bits[b];
            bits[s.out_bits[0]] = acc;
            break;
        }
        case ClassicalKind::Copy:
            for (std::size_t i = 0; i < s.out_bits.size(); ++i) bits[s.out_bits[i]] = bits[s.in_bits[i]];
            break;
        case ClassicalKind::Const:
            for (std::size_t i = 0; i < s.out_bits.size(); ++i)
                bits[s.out_bits[i]] = uint8_t((s.payload >> i) & 1);
            break;
        case ClassicalKind::NotAllZero: {
            uint8_t any = 0;
            for (auto b : s.in_bits) any |= bits[b];
            bits[s.out_bits[0]] = any;
            break;
        }
        case ClassicalKind::AndNot:
            bits[s.out_bits[0]] = uint8_t(bits[s.in_bits[0]] & (bits[s.in_bits[1]] ^ 1));
            break;
        case ClassicalKind::SConj: {
            std::size_t k = s.in_bits.size() / 3;
            for (std::size_t i = 0; i < k; ++i) {
                uint8_t x = bits[s.in_bits[i]], z = bits[s.in_bits[k + i]], b = bits[s.in_bits[2 * k + i]];
                bits[s.out_bits[i]] = x;
                bits[s.out_bits[k + i]] = uint8_t(z ^ (x & b));
            }
            break;
        }
        case ClassicalKind::HammingSteane: {
            const CssCode& code = step_code(c, s);
            const BitMat& checks = s.side == 0 ? code.pcp.h_z : code.pcp.h_x;
            BitVec z(code.n_phys);
            for (std::size_t i = 0; i < code.n_phys; ++i) z.set(i, in(i));
            BitVec syn = checks.mul_right(z);
            auto pos = hamming_decode({syn.get(0), syn.get(1), syn.get(2)});
            if (pos) z.flip(*pos - 1);
            for (std::size_t i = 0; i < code.n_phys; ++i) bits[s.out_bits[i]] = z.get(i);
            break;
        }
        case ClassicalKind::SsfDecode:
        case ClassicalKind::CorrectDecode: {
            const CssCode& code = step_code(c, s);
            CssSide side = s.side == 0 ? CssSide::X : CssSide::Z;
            std::size_t m = (side == CssSide::X) ? code.pcp.h_z.num_rows() : code.pcp.h_x.num_rows();
            BitVec syn(m);
            for (std::size_t i = 0; i < m; ++i) syn.set(i, in(i));
            DecodeResult res;
            if (s.kind == ClassicalKind::SsfDecode)
                res = small_set_flip(code, syn, std::max<std::size_t>(1, s.wait_depth), side);
            else
                res = correcting_decode(code, syn, side);
            const BitVec& rec = side == CssSide::X ? res.recovery.x : res.recovery.z;
            for (std::size_t i = 0; i < code.n_phys; ++i) bits[s.out_bits[i]] = rec.get(i);
            if (s.out_bits.size() > code.n_phys) bits[s.out_bits[code.n_phys]] = res.flag ? 1 : 0;
            break;
        }
        case ClassicalKind::LogicalExpand: {
            const CssCode& code = step_code(c, s);
            std::size_t k = code.k_logical, n = code.n_phys;
            BitVec px(n), pz(n);
            for (std::size_t i = 0; i < k; ++i) {
                if (in(i)) px ^= code.logical_x[i].x;
                if (in(k + i)) pz ^= code.logical_z[i].z;
            }
            for (std::size_t i = 0; i < n; ++i) {
                bits[s.out_bits[i]] = px.get(i);
                bits[s.out_bits[n + i]] = pz.get(i);
            }
            break;
        }
        case ClassicalKind::SymplecticMul: {
            const CliffordMap& cm = c.clifford_table[std::size_t(s.clifford_idx)];
            BitVec v(2 * cm.num_qubits());
            for (std::size_t i = 0; i < v.size(); ++i) v.set(i, in(i));
            BitVec w = cm.gamma().mul_left(v);
            for (std::size_t i = 0; i < w.size(); ++i) bits[s.out_bits[i]] = w.get(i);
            break;
        }
    }
}

struct RunOptions {
    std::mt19937_64* rng = nullptr;          // sample random outcomes
    const std::vector<bool>* forced = nullptr;  // forced branch prefix
    std::vector<bool>* record = nullptr;     // record of random outcomes taken
};

struct RunResult {
    std::vector<uint8_t> bits;
    std::size_t random_outcomes = 0;  // number of intrinsically random measurements
    bool branch_exhausted = false;    // forced prefix ran out mid-circuit
    bool impossible = false;          // forced value had probability zero
    double probability = 1.0;         // probability of the followed branch
};

namespace detail {

template <typename MeasureFn, typename GateFn, typename PrepFn>
RunResult run_circuit(const Circuit& c, MeasureFn&& do_measure, GateFn&& do_gate, PrepFn&& do_prep) {
    RunResult res;
    res.bits.assign(std::max<std::size_t>(c.num_bits, 1), 0);
    auto guarded = [&](std::size_t guard, bool neg) {
        if (guard == kNoBit) return true;
        bool g = res.bits[guard] != 0;
        return neg ? !g : g;
    };

    std::size_t li = 0, ci = 0;
    while (li < c.locations.size() || ci < c.classical.size()) {
        bool take_loc;
        if (li == c.locations.size())
            take_loc = false;
        else if (ci == c.classical.size())
            take_loc = true;
        else
            take_loc = c.locations[li].t <= c.classical[ci].t;
        if (!take_loc) {
            eval_classical(c, c.classical[ci], res.bits);
            ++ci;
            continue;
        }
        const Location& l = c.locations[li++];
        if (!guarded(l.guard, l.guard_negate)) continue;
        switch (l.kind) {
            case OpKind::GadgetBegin:
            case OpKind::GadgetEnd:
            case OpKind::Wait:
                break;
            case OpKind::Prep0:
                do_prep(l.qubits[0], false);
                break;
            case OpKind::PrepT:
                do_prep(l.qubits[0], true);
                break;
            case OpKind::Gate:
                do_gate(GateOp{l.gate, l.qubits[0], l.qubits.size() > 1 ? l.qubits[1] : 0});
                break;
            case OpKind::CondPauli:
                if (l.bx != kNoBit && res.bits[l.bx]) do_gate(GateOp{Gate::X, l.qubits[0]});
                if (l.bz != kNoBit && res.bits[l.bz]) do_gate(GateOp{Gate::Z, l.qubits[0]});
                break;
            case OpKind::CondClifford:
                if (l.bx != kNoBit && res.bits[l.bx]) do_gate(GateOp{l.tag < 0 ? Gate::Sdg : Gate::S, l.qubits[0]});
                break;
            case OpKind::FrameSelect: {
                // conditional swap of the wire contents
                do_gate(GateOp{Gate::CNOT, l.qubits[0], l.src});
                do_gate(GateOp{Gate::CNOT, l.src, l.qubits[0]});
                do_gate(GateOp{Gate::CNOT, l.qubits[0], l.src});
                break;
            }
            case OpKind::MeasureZ: {
                bool out;
                if (!do_measure(l.qubits[0], out, res)) return res;
                if (l.c_out != kNoBit) res.bits[l.c_out] = out ? 1 : 0;
                break;
            }
            default:
                throw std::invalid_argument("exec: register-level op in physical executor");
        }
    }
    return res;
}

}  // namespace detail

// Stabilizer reference execution (Clifford only).
inline RunResult ref_execute(const Circuit& c, TableauSim& sim, const RunOptions& opt) {
    auto do_measure = [&](std::size_t q, bool& out, RunResult& res) {
        double p1 = sim.prob_one(q);
        if (p1 == 0.0 || p1 == 1.0) {
            auto o = sim.measure_z(q, nullptr, p1 == 1.0);
            out = *o;
            return true;
        }
        // intrinsically random
        std::optional<bool> pick;
        if (opt.forced && res.random_outcomes < opt.forced->size())
            pick = (*opt.forced)[res.random_outcomes];
        else if (opt.rng)
            pick = (std::uniform_int_distribution<int>(0, 1)(*opt.rng) != 0);
        if (!pick) {
            res.branch_exhausted = true;
            return false;
        }
        ++res.random_outcomes;
        res.probability *= 0.5;
        if (opt.record) opt.record->push_back(*pick);
        auto o = sim.measure_z(q, nullptr, *pick);
        if (!o) {
            res.impossible = true;
            return false;
        }
        out = *o;
        return true;
    };
    auto do_gate = [&](const GateOp& g) { sim.apply(g); };
    auto do_prep = [&](std::size_t q, bool t_state) {
        if (t_state) throw std::invalid_argument("stabilizer reference: non-Clifford |T> preparation");
        if (sim.prob_one(q) == 1.0) {
            sim.apply({Gate::X, q});
        } else if (sim.prob_one(q) == 0.5) {
            auto o = sim.measure_z(q, nullptr, false);
            (void)o;
        }
    };
    return detail::run_circuit(c, do_measure, do_gate, do_prep);
}

inline RunResult ref_execute(const Circuit& c, const RunOptions& opt) {
    TableauSim sim(c.width);
    return ref_execute(c, sim, opt);
}

// Dense execution (supports T/Tdg); branch probabilities are exact.
inline RunResult dense_execute(const Circuit& c, DenseSim& sim, const RunOptions& opt) {
    auto do_measure = [&](std::size_t q, bool& out, RunResult& res) {
        double p1 = sim.prob_one(q);
        if (p1 < 1e-12 || p1 > 1 - 1e-12) {
            out = p1 > 0.5;
            sim.project(q, out);
            return true;
        }
        std::optional<bool> pick;
        if (opt.forced && res.random_outcomes < opt.forced->size())
            pick = (*opt.forced)[res.random_outcomes];
        else if (opt.rng)
            pick = (std::uniform_real_distribution<double>(0, 1)(*opt.rng) < p1);
        if (!pick) {
            res.branch_exhausted = true;
            return false;
        }
        ++res.random_outcomes;
        if (opt.record) opt.record->push_back(*pick);
        double p = sim.project(q, *pick);
        res.probability *= p;
        if (p <= 0) {
            res.impossible = true;
            return false;
        }
        out = *pick;
        return true;
    };
    auto do_gate = [&](const GateOp& g) { sim.apply(g); };
    auto do_prep = [&](std::size_t q, bool t_state) {
        if (t_state)
            sim.prep_t(q);
        else
            sim.reset_zero(q);
    };
    return detail::run_circuit(c, do_measure, do_gate, do_prep);
}

inline RunResult dense_execute(const Circuit& c, const RunOptions& opt) {
    DenseSim sim(c.width);
    return dense_execute(c, sim, opt);
}

// Exact output distribution over the listed bits by branch enumeration.
// Works for both executors; exponential in the number of intrinsically
// random measurements, so reference-corpus sized only.
template <typename ExecFn>
std::map<std::vector<uint8_t>, double> enumerate_distribution(const Circuit& c, const std::vector<std::size_t>& out_bits,
                                                              ExecFn&& exec, std::size_t max_branches = 1u << 20) {
    std::map<std::vector<uint8_t>, double> dist;
    std::vector<std::vector<bool>> stack{{}};
    std::size_t visited = 0;
    while (!stack.empty()) {
        auto prefix = std::move(stack.back());
        stack.pop_back();
        if (++visited > max_branches) throw std::runtime_error("enumerate_distribution: too many branches");
        RunOptions opt;
        opt.forced = &prefix;
        RunResult res = exec(c, opt);
        if (res.impossible || res.probability <= 0) continue;
        if (res.branch_exhausted) {
            auto a = prefix, b = prefix;
            a.push_back(false);
            b.push_back(true);
            stack.push_back(std::move(a));
            stack.push_back(std::move(b));
            continue;
        }
        std::vector<uint8_t> key;
        for (auto b : out_bits) key.push_back(res.bits[b]);
        dist[key] += res.probability;
    }
    return dist;
}

inline std::map<std::vector<uint8_t>, double> stabilizer_distribution(const Circuit& c,
                                                                      const std::vector<std::size_t>& out_bits) {
    return enumerate_distribution(c, out_bits, [](const Circuit& cc, const RunOptions& o) { return ref_execute(cc, o); });
}

inline std::map<std::vector<uint8_t>, double> dense_distribution(const Circuit& c,
                                                                 const std::vector<std::size_t>& out_bits) {
    return enumerate_distribution(c, out_bits, [](const Circuit& cc, const RunOptions& o) { return dense_execute(cc, o); });
}

}  // namespace ftqc
