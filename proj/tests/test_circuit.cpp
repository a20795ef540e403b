#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ftqc/circuit.hpp"
#include "ftqc/rng.hpp"

using namespace ftqc;

namespace {

Circuit small_closed(std::size_t w, std::size_t d_mid) {
    Circuit c;
    c.width = w;
    for (std::size_t q = 0; q < w; ++q) c.locations.push_back(loc_simple(0, OpKind::Prep0, q));
    for (std::size_t t = 1; t <= d_mid; ++t)
        for (std::size_t q = 0; q < w; ++q) c.locations.push_back(loc_gate(t, Gate::H, q));
    for (std::size_t q = 0; q < w; ++q) {
        auto l = loc_simple(d_mid + 1, OpKind::MeasureZ, q);
        l.c_out = c.alloc_bit();
        c.locations.push_back(l);
    }
    c.finalize();
    return c;
}

}  // namespace

TEST_CASE("empty circuit validates", "[circuit]") {
    Circuit c;
    c.open_circuit = true;
    REQUIRE(validate(c).empty());
}

TEST_CASE("double occupancy is reported with position", "[circuit]") {
    Circuit c;
    c.width = 2;
    c.open_circuit = true;
    c.locations.push_back(loc_gate(3, Gate::H, 1));
    c.locations.push_back(loc_gate(3, Gate::S, 1));
    auto v = validate(c);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].t == 3);
    REQUIRE(v[0].qubit == 1);
}

TEST_CASE("closed circuit shape rules", "[circuit]") {
    auto ok = small_closed(3, 2);
    REQUIRE(validate(ok).empty());
    auto m = size_metrics(ok);
    REQUIRE(m.width == 3);
    REQUIRE(m.depth == 4);
    REQUIRE(m.size == 12);

    // missing terminal measurement on one wire
    Circuit bad = ok;
    bad.locations.pop_back();
    bad.locations.push_back(loc_gate(4, Gate::H, 2));
    bad.finalize();
    auto v = validate(bad);
    REQUIRE_FALSE(v.empty());
}

TEST_CASE("random legal circuits validate", "[circuit]") {
    auto rng = make_rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t w = 10, d = 20;
        Circuit c;
        c.width = w;
        for (std::size_t q = 0; q < w; ++q) c.locations.push_back(loc_simple(0, OpKind::Prep0, q));
        for (std::size_t t = 1; t <= d; ++t) {
            std::vector<std::size_t> perm(w);
            for (std::size_t i = 0; i < w; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), rng);
            std::size_t i = 0;
            while (i + 1 < w) {
                if (rng() % 3 == 0) {
                    c.locations.push_back(loc_gate(t, Gate::CNOT, perm[i], perm[i + 1]));
                    i += 2;
                } else {
                    c.locations.push_back(loc_gate(t, rng() % 2 ? Gate::H : Gate::S, perm[i]));
                    i += 1;
                }
            }
            for (; i < w; ++i) c.locations.push_back(loc_simple(t, OpKind::Wait, perm[i]));
        }
        for (std::size_t q = 0; q < w; ++q) {
            auto l = loc_simple(d + 1, OpKind::MeasureZ, q);
            l.c_out = c.alloc_bit();
            c.locations.push_back(l);
        }
        c.finalize();
        REQUIRE(validate(c).empty());
        REQUIRE(size_metrics(c).size == w * (d + 2));
    }
}

TEST_CASE("wire prep+measure gives (1,2,2)", "[circuit]") {
    auto c = small_closed(1, 0);
    auto m = size_metrics(c);
    REQUIRE(m.width == 1);
    REQUIRE(m.depth == 2);
    REQUIRE(m.size == 2);
}

TEST_CASE("serial composition adds depth", "[circuit]") {
    Circuit a, b;
    a.width = b.width = 2;
    a.open_circuit = b.open_circuit = true;
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t q = 0; q < 2; ++q) a.locations.push_back(loc_gate(t, Gate::H, q));
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t q = 0; q < 2; ++q) b.locations.push_back(loc_gate(t, Gate::S, q));
    auto c = compose_serial(a, b);
    REQUIRE(c.depth() == 5);
    REQUIRE(validate(c).empty());
    REQUIRE_THROWS(compose_serial(a, small_closed(3, 1)));
}

TEST_CASE("parallel composition adds width and max-aligns depth", "[circuit]") {
    Circuit a, b;
    a.width = 2;
    b.width = 3;
    a.open_circuit = b.open_circuit = true;
    a.locations.push_back(loc_gate(0, Gate::H, 0));
    for (std::size_t t = 0; t < 4; ++t) b.locations.push_back(loc_gate(t, Gate::H, 2));
    auto c = compose_parallel(a, b);
    REQUIRE(c.width == 5);
    REQUIRE(c.depth() == 4);
    REQUIRE(validate(c).empty());
}

TEST_CASE("composition associativity on random triples", "[circuit]") {
    auto rng = make_rng(73);
    for (int t = 0; t < 10; ++t) {
        Circuit cs[3];
        for (int i = 0; i < 3; ++i) {
            cs[i].width = 1 + rng() % 3;
            cs[i].open_circuit = true;
            std::size_t d = 1 + rng() % 3;
            for (std::size_t tt = 0; tt < d; ++tt)
                cs[i].locations.push_back(loc_gate(tt, Gate::H, rng() % cs[i].width));
        }
        auto left = compose_parallel(compose_parallel(cs[0], cs[1]), cs[2]);
        auto right = compose_parallel(cs[0], compose_parallel(cs[1], cs[2]));
        REQUIRE(left.width == right.width);
        REQUIRE(left.depth() == right.depth());
        REQUIRE(left.locations.size() == right.locations.size());
        for (std::size_t i = 0; i < left.locations.size(); ++i) {
            REQUIRE(left.locations[i].t == right.locations[i].t);
            REQUIRE(left.locations[i].qubits == right.locations[i].qubits);
        }
    }
}

TEST_CASE("text format round trip", "[circuit]") {
    auto c = small_closed(2, 1);
    std::stringstream ss;
    write_circuit(ss, c);
    auto back = parse_circuit(ss);
    REQUIRE(back.width == 2);
    REQUIRE(back.depth() == 3);
    REQUIRE_FALSE(back.open_circuit);
    REQUIRE(validate(back).empty());
    REQUIRE(back.locations.size() == c.locations.size());
}

TEST_CASE("parse errors carry line numbers", "[circuit]") {
    std::stringstream bad("WIDTH 2 DEPTH 1 MODE closed\nt=0 op=frobnicate q=0\n");
    try {
        parse_circuit(bad);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::stringstream nohdr("t=0 op=H q=0\n");
    REQUIRE_THROWS(parse_circuit(nohdr));
}

TEST_CASE("validate composes with compose", "[circuit]") {
    auto a = small_closed(2, 1);
    Circuit b;
    b.width = 2;
    b.open_circuit = true;
    b.locations.push_back(loc_gate(0, Gate::CZ, 0, 1));
    REQUIRE(validate(compose_parallel(a, b)).empty());
}
