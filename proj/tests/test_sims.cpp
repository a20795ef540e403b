#include <catch2/catch_amalgamated.hpp>

#include "ftqc/dense_sim.hpp"
#include "ftqc/rng.hpp"
#include "ftqc/tableau_sim.hpp"

using namespace ftqc;

TEST_CASE("dense T on plus state", "[sims]") {
    DenseSim s(1);
    s.apply({Gate::H, 0});
    s.apply({Gate::T, 0});
    auto a = s.amplitudes();
    REQUIRE(std::abs(a[0] - std::complex<double>(1 / std::sqrt(2), 0)) < 1e-12);
    REQUIRE(std::abs(a[1] - std::polar(1 / std::sqrt(2), M_PI / 4)) < 1e-12);
}

TEST_CASE("dense prep_t matches TH|0>", "[sims]") {
    DenseSim a(1), b(1);
    a.prep_t(0);
    b.apply({Gate::H, 0});
    b.apply({Gate::T, 0});
    REQUIRE(a.fidelity(b) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("tableau deterministic and random measurements", "[sims]") {
    TableauSim s(2);
    auto rng = make_rng(1);
    auto m0 = s.measure_z(0, &rng);
    REQUIRE(m0.has_value());
    REQUIRE(*m0 == false);

    s.apply({Gate::H, 0});
    REQUIRE(s.prob_one(0) == Catch::Approx(0.5));
    auto forced = s.measure_z(0, nullptr, true);
    REQUIRE(forced.has_value());
    REQUIRE(*forced == true);
    // now deterministic one
    REQUIRE(s.prob_one(0) == Catch::Approx(1.0));
    auto imp = s.measure_z(0, nullptr, false);
    REQUIRE_FALSE(imp.has_value());
}

TEST_CASE("tableau GHZ correlations", "[sims]") {
    for (int branch = 0; branch < 2; ++branch) {
        TableauSim s(3);
        s.apply({Gate::H, 0});
        s.apply({Gate::CNOT, 0, 1});
        s.apply({Gate::CNOT, 1, 2});
        auto m0 = s.measure_z(0, nullptr, branch == 1);
        REQUIRE(m0.has_value());
        auto m1 = s.measure_z(1, nullptr, std::nullopt);
        auto m2 = s.measure_z(2, nullptr, std::nullopt);
        // after forcing the first, the rest are deterministic and equal
        REQUIRE(s.prob_one(1) == (branch ? 1.0 : 0.0));
        REQUIRE(*m1 == (branch == 1));
        REQUIRE(*m2 == (branch == 1));
    }
}

TEST_CASE("tableau matches dense on random Clifford circuits", "[sims]") {
    auto rng = make_rng(53);
    static const Gate pool[] = {Gate::H, Gate::S, Gate::Sdg, Gate::X, Gate::Z, Gate::CNOT, Gate::CZ};
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 2 + rng() % 3;
        TableauSim t(n);
        DenseSim d(n);
        for (int k = 0; k < 14; ++k) {
            GateOp op{pool[rng() % 7], rng() % n, 0};
            if (gate_is_two_qubit(op.g)) {
                do {
                    op.q1 = rng() % n;
                } while (op.q1 == op.q0);
            }
            t.apply(op);
            d.apply(op);
        }
        for (std::size_t q = 0; q < n; ++q)
            REQUIRE(t.prob_one(q) == Catch::Approx(d.prob_one(q)).margin(1e-12));
        // project both on a common branch and compare again
        std::size_t q0 = rng() % n;
        bool out = t.prob_one(q0) == 1.0;
        if (t.prob_one(q0) == 0.5) out = rng() & 1;
        auto r = t.measure_z(q0, nullptr, out);
        REQUIRE(r.has_value());
        d.project(q0, out);
        for (std::size_t q = 0; q < n; ++q)
            REQUIRE(t.prob_one(q) == Catch::Approx(d.prob_one(q)).margin(1e-12));
    }
}

TEST_CASE("tableau expectation and canonical stabilizers", "[sims]") {
    TableauSim s(2);
    s.apply({Gate::H, 0});
    s.apply({Gate::CNOT, 0, 1});
    // Bell state: stabilized by +XX and +ZZ
    REQUIRE(s.expectation(PauliWord::parse("XX")) == +1);
    REQUIRE(s.expectation(PauliWord::parse("ZZ")) == +1);
    REQUIRE(s.expectation(PauliWord::parse("-XX")) == -1);
    REQUIRE(s.expectation(PauliWord::parse("ZI")) == 0);
    // -YY stabilizes the Bell state: YY = (XX)(ZZ) * (-1)
    REQUIRE(s.expectation(PauliWord::parse("-YY")) == +1);

    TableauSim r(2);
    r.apply({Gate::H, 1});
    r.apply({Gate::CNOT, 1, 0});
    REQUIRE(s.same_state(r));

    TableauSim other(2);
    REQUIRE_FALSE(s.same_state(other));
}

TEST_CASE("apply_pauli_frame flips signs like the gates", "[sims]") {
    auto rng = make_rng(59);
    for (int t = 0; t < 10; ++t) {
        TableauSim a(3), b(3);
        for (auto* s : {&a, &b}) {
            s->apply({Gate::H, 0});
            s->apply({Gate::CNOT, 0, 1});
            s->apply({Gate::S, 2});
        }
        PauliWord p(3);
        for (std::size_t q = 0; q < 3; ++q) {
            p.x.set(q, rng() & 1);
            p.z.set(q, rng() & 1);
        }
        a.apply_pauli_frame(p);
        for (std::size_t q = 0; q < 3; ++q) {
            if (p.x.get(q)) b.apply({Gate::X, q});
            if (p.z.get(q)) b.apply({Gate::Z, q});
        }
        REQUIRE(a.same_state(b));
    }
}
