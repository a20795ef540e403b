#include <catch2/catch_amalgamated.hpp>

#include "ftqc/steane_analysis.hpp"
#include "ftqc/steane_checks.hpp"

using namespace ftqc;

namespace {

const SteaneContext& ctx() { return SteaneContext::instance(); }

// encode a logical test state on `block`: 0 -> |0bar>, 1 -> |+bar>,
// 2 -> Sbar|+bar> (Y eigenstate), 3 -> |1bar>
std::size_t encode_state(Circuit& c, std::size_t t0, const std::array<std::size_t, 7>& block, int which) {
    steane_detail::append_prep_block(c, t0, block);
    if (which == 1 || which == 2) c.locations.push_back(loc_gate(t0 + 1, Gate::H, block[0]));
    if (which == 2) c.locations.push_back(loc_gate(t0 + 2, Gate::S, block[0]));
    if (which == 3) c.locations.push_back(loc_gate(t0 + 1, Gate::X, block[0]));
    return steane_detail::append_encoder(c, t0 + 3, ctx().enc, block);
}

int expected_z(int which) { return which == 0 ? 1 : which == 3 ? -1 : 0; }
int expected_x(int which) { return which == 1 ? 1 : 0; }

}  // namespace

TEST_CASE("zero prep: noiseless exactness and exhaustive single faults", "[steane]") {
    Circuit base;
    base.width = kBank;
    base.open_circuit = true;
    Bank bank{0};
    auto zp = append_zero_prep(base, 0, ctx(), bank.data(), bank.aux_block(0), bank.aux_block(1));
    base.finalize();

    // noiseless: exact |0bar>, verification passes
    {
        auto rng = make_rng(1);
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(base.width);
        auto res = ref_execute(base, sim, opt);
        REQUIRE(res.bits[zp.fail_bit] == 0);
        auto dec = ideal_decode_block(sim, bank.data(), ctx());
        REQUIRE(dec.has_value());
        REQUIRE(dec->correction_weight == 0);
        REQUIRE(dec->logical_z == 1);
    }

    // every single fault: after ideal decode, the output is |0bar>
    auto variants = enumerate_single_faults(base);
    std::size_t rejected = 0;
    for (auto& v : variants) {
        auto rng = make_rng(v.location);
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(v.circuit.width);
        auto res = ref_execute(v.circuit, sim, opt);
        if (res.bits[zp.fail_bit]) ++rejected;
        auto dec = ideal_decode_block(sim, bank.data(), ctx());
        REQUIRE(dec.has_value());
        INFO("fault at location " << v.location << " (" << v.what << ")");
        REQUIRE(dec->correction_weight <= 1);
        REQUIRE(dec->logical_z == 1);
    }
    REQUIRE(rejected > 0);  // verification does fire for some injections
}

TEST_CASE("knill ec conditions A and B", "[steane]") {
    for (int which : {0, 1, 2}) {
        // EC A: weight-1 input error, no internal fault -> exact recovery
        for (int eq = -1; eq < 7; ++eq) {
            for (Gate eg : {Gate::X, Gate::Z}) {
                if (eq < 0 && eg == Gate::Z) continue;
                Circuit c;
                c.width = kBank;
                c.open_circuit = true;
                Bank bank{0};
                std::size_t t = encode_state(c, 0, bank.data(), which);
                if (eq >= 0) c.locations.push_back(loc_gate(t, eg, bank.data()[std::size_t(eq)]));
                append_knill_ec(c, t + 1, ctx(), bank, bank.data());
                c.finalize();
                auto rng = make_rng(uint64_t(17 + eq));
                RunOptions opt;
                opt.rng = &rng;
                TableauSim sim(c.width);
                ref_execute(c, sim, opt);
                REQUIRE(zero_filter_accepts(sim, bank.data(), ctx()));
                auto dec = ideal_decode_block(sim, bank.data(), ctx());
                REQUIRE(dec.has_value());
                REQUIRE(dec->logical_z == expected_z(which));
                REQUIRE(dec->logical_x == expected_x(which));
            }
        }
    }

    // EC B: clean input, every single internal fault -> within weight 1 and
    // logical state preserved after ideal decode
    Circuit c;
    c.width = kBank;
    c.open_circuit = true;
    Bank bank{0};
    std::size_t t = encode_state(c, 0, bank.data(), 0);
    Circuit ec;
    ec.width = kBank;
    ec.open_circuit = true;
    append_knill_ec(ec, 0, ctx(), bank, bank.data());
    ec.finalize();
    auto variants = enumerate_single_faults(ec);
    for (auto& v : variants) {
        Circuit full = compose_serial([&] {
            Circuit pre = c;
            pre.finalize();
            return pre;
        }(), v.circuit);
        auto rng = make_rng(v.location + 1000);
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(full.width);
        ref_execute(full, sim, opt);
        auto dec = ideal_decode_block(sim, bank.data(), ctx());
        REQUIRE(dec.has_value());
        INFO("ec fault at " << v.location << " (" << v.what << ")");
        REQUIRE(dec->correction_weight <= 1);
        REQUIRE(dec->logical_z == 1);
    }
}

TEST_CASE("gate conditions for the transversal cnot", "[steane]") {
    // Gate A (s=0, input error weight <= 1) and the logical action table
    for (int w1 : {0, 1}) {
        for (int eq = -1; eq < 14; ++eq) {
            Circuit c;
            c.width = 2 * kBank;
            c.open_circuit = true;
            Bank b0{0}, b1{kBank};
            std::size_t t0a = encode_state(c, 0, b0.data(), w1);
            std::size_t t0b = encode_state(c, 0, b1.data(), 0);
            std::size_t t = std::max(t0a, t0b);
            if (eq >= 0) {
                auto blk = eq < 7 ? b0.data() : b1.data();
                c.locations.push_back(loc_gate(t, Gate::X, blk[std::size_t(eq % 7)]));
            }
            steane_detail::append_transversal_cnot(c, t + 1, b0.data(), b1.data());
            c.finalize();
            auto rng = make_rng(uint64_t(7 * w1 + eq));
            RunOptions opt;
            opt.rng = &rng;
            TableauSim sim(c.width);
            ref_execute(c, sim, opt);
            auto d0 = ideal_decode_block(sim, b0.data(), ctx());
            auto d1 = ideal_decode_block(sim, b1.data(), ctx());
            REQUIRE(d0.has_value());
            REQUIRE(d1.has_value());
            if (w1 == 0) {
                REQUIRE(d0->logical_z == 1);
                REQUIRE(d1->logical_z == 1);
            } else {
                // |+bar>|0bar> -> bell pair: joint logical XX and ZZ are +1
                REQUIRE(d0->logical_z == 0);
            }
        }
    }
    // non-transversal two-qubit gate inside one block violates Gate B
    {
        Circuit c;
        c.width = kBank;
        c.open_circuit = true;
        Bank bank{0};
        std::size_t t = encode_state(c, 0, bank.data(), 0);
        c.locations.push_back(loc_gate(t, Gate::CNOT, bank.data()[0], bank.data()[1]));
        // single fault on the control before the intra-block gate spreads
        c.locations.push_back(loc_gate(t - 1, Gate::X, bank.data()[0]));
        c.finalize();
        auto rng = make_rng(77);
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(c.width);
        ref_execute(c, sim, opt);
        auto dec = ideal_decode_block(sim, bank.data(), ctx());
        // weight-2 error: either the block's stabilizers are scrambled or
        // the ideal decoder is driven to a logical error
        REQUIRE((!dec.has_value() || dec->logical_z != 1));
    }
}

TEST_CASE("measurement conditions", "[steane]") {
    for (int which : {0, 3}) {
        Circuit base;
        base.width = kBank;
        base.open_circuit = true;
        Bank bank{0};
        std::size_t t = encode_state(base, 0, bank.data(), which);
        Circuit meas;
        meas.width = kBank;
        meas.open_circuit = true;
        std::array<std::size_t, 7> bits{};
        std::size_t tm = steane_detail::append_measure_block(meas, 0, bank.data(), bits);
        std::size_t out = meas.alloc_bit();
        steane_detail::append_steane_readout(meas, tm, ctx(), bits, out, 0);
        meas.finalize();
        (void)t;
        // Meas A with weight-1 input errors and Meas B with single faults
        auto run = [&](const Circuit& measc, int eq) {
            Circuit full = base;
            full.finalize();
            if (eq >= 0) {
                Circuit err;
                err.width = kBank;
                err.open_circuit = true;
                err.locations.push_back(loc_gate(0, Gate::X, bank.data()[std::size_t(eq)]));
                err.finalize();
                full = compose_serial(full, err);
            }
            std::size_t shift = full.num_bits;
            full = compose_serial(full, measc);
            auto rng = make_rng(uint64_t(which * 31 + eq));
            RunOptions opt;
            opt.rng = &rng;
            auto res = ref_execute(full, opt);
            return res.bits[shift + out];
        };
        for (int eq = -1; eq < 7; ++eq)
            REQUIRE(int(run(meas, eq)) == (which == 3 ? 1 : 0));
        auto variants = enumerate_single_faults(meas);
        for (auto& v : variants) {
            INFO("meas fault at " << v.location);
            REQUIRE(int(run(v.circuit, -1)) == (which == 3 ? 1 : 0));
        }
    }
}

TEST_CASE("decoding gadget validity", "[steane]") {
    for (int which : {0, 1, 2}) {
        Circuit c;
        c.width = kBank;
        c.open_circuit = true;
        Bank bank{0};
        std::size_t t = encode_state(c, 0, bank.data(), which);
        append_decoding_gadget(c, t, ctx(), bank, bank.data(), bank.single(3));
        c.finalize();
        auto rng = make_rng(uint64_t(41 + which));
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(c.width);
        ref_execute(c, sim, opt);
        std::size_t q = bank.single(3);
        PauliWord pz(c.width), px(c.width), py(c.width);
        pz.z.set(q, true);
        px.x.set(q, true);
        py.x.set(q, true);
        py.z.set(q, true);
        py.sign = true;  // hermitian -ZX representative of +Y... pinned below
        if (which == 0) REQUIRE(sim.expectation(pz) == 1);
        if (which == 1) REQUIRE(sim.expectation(px) == 1);
        if (which == 2) {
            // S|+> is the +1 eigenstate of Y; in the hermitian convention
            // the word with x=z=1 and sign 0 is +Y
            PauliWord y(c.width);
            y.x.set(q, true);
            y.z.set(q, true);
            REQUIRE(sim.expectation(y) == 1);
        }
    }
}

TEST_CASE("t prep: noiseless exactness (dense) and sampled fault sweep", "[steane][slow]") {
    Circuit c;
    c.width = kBank;
    c.open_circuit = true;
    Bank bank{0};
    auto r = append_t_prep(c, 0, ctx(), bank, bank.data());
    std::size_t t = c.depth() + 1;
    // undo encoding and the T rotation so |Tbar> maps to |0...0> on the block
    std::vector<GateOp> inv;
    for (auto it = ctx().enc.gates.rbegin(); it != ctx().enc.gates.rend(); ++it) {
        GateOp g = *it;
        if (g.g == Gate::S) g.g = Gate::Sdg;
        else if (g.g == Gate::Sdg) g.g = Gate::S;
        inv.push_back(g);
    }
    for (const auto& g : inv)
        c.locations.push_back(loc_gate(t++, g.g, bank.data()[g.q0], gate_is_two_qubit(g.g) ? bank.data()[g.q1] : kNoBit));
    c.locations.push_back(loc_gate(t++, Gate::Tdg, bank.data()[0]));
    c.locations.push_back(loc_gate(t++, Gate::H, bank.data()[0]));
    c.finalize();
    auto comp = compact_wires(c);
    REQUIRE(comp.slots <= 16);

    auto block_ok = [&](DenseSim& sim) {
        for (std::size_t i = 0; i < 7; ++i) {
            std::size_t s = comp.final_slot[bank.data()[i]];
            if (s == ~std::size_t(0)) return false;
            if (sim.prob_one(s) > 1e-9) return false;
        }
        return true;
    };
    // noiseless over several measurement branches
    for (uint64_t seed = 0; seed < 6; ++seed) {
        auto rng = make_rng(seed, 99);
        RunOptions opt;
        opt.rng = &rng;
        DenseSim sim(comp.slots);
        auto res = dense_execute(comp.circuit, sim, opt);
        REQUIRE(res.bits[r.fail_bit] == 0);
        REQUIRE(block_ok(sim));
    }
    // sampled single-fault sweep (every 5th variant, 2 branch seeds):
    // conditioned on pass, the output is within one Pauli of |Tbar>
    auto variants = enumerate_single_faults(comp.circuit);
    std::size_t checked = 0, rejected = 0;
    for (std::size_t vi = 0; vi < variants.size(); vi += 5) {
        auto& v = variants[vi];
        for (uint64_t seed = 0; seed < 2; ++seed) {
            auto rng = make_rng(seed * 131 + vi, 7);
            RunOptions opt;
            opt.rng = &rng;
            DenseSim sim(comp.slots);
            auto res = dense_execute(v.circuit, sim, opt);
            if (res.impossible) continue;
            if (res.bits[r.fail_bit]) {
                ++rejected;
                continue;  // discarded-and-retried runs are re-encoded clean,
                           // checked via the pass branch of other seeds
            }
            // accept if some weight-<=1 Pauli on the block repairs it
            bool ok = false;
            for (int cand = -1; cand < 21 && !ok; ++cand) {
                DenseSim probe = sim;
                if (cand >= 0) {
                    std::size_t q = comp.final_slot[bank.data()[std::size_t(cand / 3)]];
                    Gate g = cand % 3 == 0 ? Gate::X : cand % 3 == 1 ? Gate::Z : Gate::Y;
                    probe.apply({g, q});
                }
                ok = block_ok(probe);
            }
            INFO("t-prep fault at " << v.location << " (" << v.what << ") seed " << seed);
            REQUIRE(ok);
            ++checked;
        }
    }
    REQUIRE(checked > 50);
    REQUIRE(rejected > 0);
}

TEST_CASE("level compile: logical bell correlations survive", "[steane][slow]") {
    Circuit c;
    c.width = 2;
    c.open_circuit = false;
    c.locations.push_back(loc_simple(0, OpKind::Prep0, 0));
    c.locations.push_back(loc_simple(0, OpKind::Prep0, 1));
    c.locations.push_back(loc_gate(1, Gate::H, 0));
    c.locations.push_back(loc_simple(1, OpKind::Wait, 1));
    c.locations.push_back(loc_gate(2, Gate::CNOT, 0, 1));
    Location m0 = loc_simple(3, OpKind::MeasureZ, 0);
    m0.c_out = c.alloc_bit();
    Location m1 = loc_simple(3, OpKind::MeasureZ, 1);
    m1.c_out = c.alloc_bit();
    c.locations.push_back(m0);
    c.locations.push_back(m1);
    c.finalize();

    auto lc = compile_level_down(c);
    int ones = 0;
    for (uint64_t seed = 0; seed < 12; ++seed) {
        auto rng = make_rng(seed, 5);
        RunOptions opt;
        opt.rng = &rng;
        auto res = ref_execute(lc.circuit, opt);
        REQUIRE(res.bits[m0.c_out] == res.bits[m1.c_out]);
        ones += res.bits[m0.c_out];
    }
    REQUIRE(ones > 0);
    REQUIRE(ones < 12);
}

TEST_CASE("level compile: open circuit decodes to the unencoded state", "[steane]") {
    Circuit o;
    o.width = 1;
    o.open_circuit = true;
    o.locations.push_back(loc_simple(0, OpKind::Prep0, 0));
    o.locations.push_back(loc_gate(1, Gate::H, 0));
    o.finalize();
    auto lo = compile_level_down(o);
    for (uint64_t seed = 0; seed < 4; ++seed) {
        auto rng = make_rng(seed, 6);
        RunOptions opt;
        opt.rng = &rng;
        TableauSim sim(lo.circuit.width);
        ref_execute(lo.circuit, sim, opt);
        PauliWord px(lo.circuit.width);
        px.x.set(lo.output_wires[0], true);
        REQUIRE(sim.expectation(px) == 1);
    }
}

TEST_CASE("exrec monte carlo basics", "[steane]") {
    auto ex = build_cnot_exrec(1);
    auto sim = make_exrec_sim(ex);
    auto st0 = exrec_failure_rate(sim, ex, 0.0, 1, 500);
    REQUIRE(st0.failures == 0);
    // single faults are never malignant in the window
    NoiseSpec off;
    off.p_loc = 0;
    FrameSim::Workspace ws;
    auto tags = sim.fault_tags();
    std::size_t scanned = 0;
    for (std::size_t f = 0; f < tags.size() && scanned < 400; ++f) {
        if (!(tags[f] == -88 || (tags[f] >= 3 && tags[f] <= 5))) continue;
        if (f % 3 != 0) continue;  // subsample for speed
        for (int pk = 1; pk <= 3; ++pk) {
            PauliWord p(2);
            if (pk & 1) p.x.set(0, true), p.x.set(1, true);
            if (pk & 2) p.z.set(0, true), p.z.set(1, true);
            std::vector<std::pair<std::size_t, PauliWord>> inj{{f, p}};
            auto res = sim.trial(off, 0, ws, &inj);
            REQUIRE_FALSE(res.heralded_non_pauli);
            REQUIRE_FALSE(exrec_frame_malignant(ex, *res.frame_x, *res.frame_z));
        }
        ++scanned;
    }
    REQUIRE(scanned >= 100);
    // rates grow with p (coarse smoke of the fit machinery)
    auto hi = exrec_failure_rate(sim, ex, 3e-3, 3, 4000);
    auto lojs = exrec_failure_rate(sim, ex, 3e-4, 4, 4000);
    REQUIRE(hi.rate() > lojs.rate());
    auto table = suppression_table(1e-5, 7e-5, 3);
    REQUIRE(table[0] == Catch::Approx(1e-5));
    REQUIRE(table[1] < table[0]);
    REQUIRE(table[2] < table[1]);
}
