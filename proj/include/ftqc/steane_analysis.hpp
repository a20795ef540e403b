#pragma once

// Level-reduction analysis of the Steane protocol: ExRec construction at
// levels 1 and 2, Monte Carlo logical-fault rates under the local
// stochastic model, the quadratic fit p1 ~ A p^2, and the implied
// threshold constants with the doubly exponential suppression table.

#include "ftqc/frame_sim.hpp"
#include "ftqc/stats.hpp"
#include "ftqc/steane.hpp"

namespace ftqc {

struct ExRec {
    Circuit circuit;       // physical circuit: prep rectangles + lead EC + gadget + trail EC
    std::size_t level;
    std::size_t width_per_wire;
    std::vector<uint8_t> window_mask;  // per top-level-slice tag: count only lead EC + gadget + trail EC
};

// The CNOT extended rectangle at the given concatenation level. Faults in
// the initial verified preparations are excluded from the counting window
// (they model the incoming codeword, not the rectangle); the window is the
// lead EC, the gadget, and the trailing EC, identified by the compiler's
// slice tags at the top level.
inline ExRec build_cnot_exrec(std::size_t level) {
    Circuit base;
    base.width = 2;
    base.open_circuit = false;
    base.locations.push_back(loc_simple(0, OpKind::Prep0, 0));
    base.locations.push_back(loc_simple(0, OpKind::Prep0, 1));
    base.locations.push_back(loc_gate(1, Gate::CNOT, 0, 1));
    base.finalize();

    ExRec ex;
    ex.level = level;
    auto first = compile_level_down(base);
    Circuit cur = first.circuit;
    // top-level tags: 2 = prep gadgets, 3 = lead EC (incl. its charge),
    // 4 = CNOT gadget, 5 = trail EC, 7 = unused trailing charge; re-tag to
    // the window marker, which deeper compiles propagate
    for (auto& l : cur.locations) l.tag = (l.tag >= 3 && l.tag <= 5) ? -88 : -89;
    for (std::size_t l = 1; l < level; ++l) cur = compile_level_down(cur).circuit;
    ex.circuit = cur;
    ex.width_per_wire = 1;
    for (std::size_t l = 0; l < level; ++l) ex.width_per_wire *= kBank;
    return ex;
}

inline FrameSim make_exrec_sim(const ExRec& ex, uint64_t fiducial_seed = 1) {
    FrameSim sim(ex.circuit, fiducial_seed);
    auto tags = sim.fault_tags();
    std::vector<uint8_t> mask(tags.size(), 0);
    for (std::size_t i = 0; i < tags.size(); ++i)
        mask[i] = (tags[i] == -88 || (tags[i] >= 3 && tags[i] <= 5)) ? 1 : 0;
    sim.set_noise_mask(std::move(mask));
    return sim;
}

struct ExRecStats {
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t heralded = 0;
    double rate() const { return trials ? double(failures) / double(trials) : 0.0; }
};

// Logical failure: after ideal decoding of the residual frame, either block
// carries a logical X or Z component on either side.
inline bool exrec_frame_malignant(const ExRec& ex, const BitVec& fx, const BitVec& fz) {
    const CssCode& code = SteaneContext::instance().code;
    for (std::size_t w = 0; w < 2; ++w) {
        std::size_t base = w * ex.width_per_wire;
        if (steane_frame_logical_banked(fx, ex.level, code, base, kBank)) return true;
        if (steane_frame_logical_banked(fz, ex.level, code, base, kBank)) return true;
    }
    return false;
}

inline ExRecStats exrec_failure_rate(FrameSim& sim, const ExRec& ex, double p, uint64_t seed, std::size_t trials) {
    NoiseSpec spec;
    spec.p_loc = p;
    spec.seed = seed;
    ExRecStats st;
    st.trials = trials;
    FrameSim::Workspace ws;
    for (uint64_t t = 0; t < trials; ++t) {
        auto res = sim.trial(spec, t, ws);
        if (res.heralded_non_pauli) {
            ++st.heralded;
            ++st.failures;
            continue;
        }
        if (exrec_frame_malignant(ex, *res.frame_x, *res.frame_z)) ++st.failures;
    }
    return st;
}

struct LevelReductionFit {
    std::vector<double> p_grid;
    std::vector<ExRecStats> stats;
    double slope = 0.0;       // log-log slope, quadratic suppression ~ 2
    double a_hat = 0.0;       // fitted A in p1 ~ A p^2
    double p_prime_th = 0.0;  // 1 / A
    double p_th = 0.0;        // p_prime_th / 2
};

inline LevelReductionFit level_reduction_fit(const std::vector<double>& p_grid, std::size_t trials, uint64_t seed,
                                             std::size_t level = 1) {
    if (p_grid.size() < 2) throw std::invalid_argument("level_reduction_fit: need at least two points");
    auto ex = build_cnot_exrec(level);
    FrameSim sim = make_exrec_sim(ex);
    LevelReductionFit fit;
    fit.p_grid = p_grid;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t npts = 0;
    double a_acc = 0;
    std::size_t a_n = 0;
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        auto st = exrec_failure_rate(sim, ex, p_grid[i], seed + i, trials);
        fit.stats.push_back(st);
        if (st.failures == 0) continue;
        double x = std::log(p_grid[i]), y = std::log(st.rate());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
        a_acc += st.rate() / (p_grid[i] * p_grid[i]);
        ++a_n;
    }
    if (npts < 2) throw std::runtime_error("level_reduction_fit: insufficient failure statistics");
    double n = double(npts);
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.a_hat = a_acc / double(a_n);
    fit.p_prime_th = 1.0 / fit.a_hat;
    fit.p_th = fit.p_prime_th / 2.0;
    return fit;
}

// p^(L) = p'_th (p / p'_th)^{2^L}: the doubly exponential suppression table.
inline std::vector<double> suppression_table(double p, double p_prime_th, std::size_t max_level) {
    std::vector<double> out;
    for (std::size_t l = 0; l <= max_level; ++l) {
        double e = std::pow(2.0, double(l));
        out.push_back(p_prime_th * std::pow(p / p_prime_th, e));
    }
    return out;
}

}  // namespace ftqc
