#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ftqc/codes.hpp"

using namespace ftqc;

TEST_CASE("steane parameters and invariants", "[codes]") {
    auto code = steane();
    REQUIRE(code.n_phys == 7);
    REQUIRE(code.k_logical == 1);
    REQUIRE(code.distance == 3);
    REQUIRE(code.distance_exact);
    REQUIRE(code.pcp.css_valid());
    std::string why;
    REQUIRE(code.check_invariants(&why));
    REQUIRE(code.pcp.h_z.mul(code.pcp.h_x.transpose()).is_zero());
}

TEST_CASE("steane distance by brute force", "[codes]") {
    auto code = steane();
    auto [d, exact] = brute_force_distance(code, 3);
    REQUIRE(exact);
    REQUIRE(d == 3);
    // no logical of weight <= 2
    auto [d2, exact2] = brute_force_distance(code, 2);
    REQUIRE_FALSE(exact2);
    REQUIRE(d2 == 3);  // reported as ">= w_max+1"
}

TEST_CASE("concatenated steane parameters", "[codes]") {
    REQUIRE_THROWS(concatenated_steane(0));
    auto l1 = concatenated_steane(1);
    REQUIRE(l1.n_phys == 7);
    REQUIRE(l1.distance == 3);
    auto l2 = concatenated_steane(2);
    REQUIRE(l2.n_phys == 49);
    REQUIRE(l2.k_logical == 1);
    REQUIRE(l2.distance == 9);
    // generator count N - K at L = 2
    REQUIRE(l2.n_phys - l2.k_logical == 48);
    auto l3 = concatenated_steane(3);
    REQUIRE(l3.n_phys == 343);
    REQUIRE(l3.distance == 27);
    // per-level block layout
    auto [start, len] = ConcatenatedSteane::child_span(0, 2, 3);
    REQUIRE(start == 21);
    REQUIRE(len == 7);
}

TEST_CASE("hypergraph product of repetition checks is [[13,1,3]]", "[codes]") {
    auto rep = BitMat::from_rows({"110", "011"});
    auto code = hypergraph_product(rep, rep);
    REQUIRE(code.n_phys == 13);
    REQUIRE(code.k_logical == 1);
    REQUIRE(code.pcp.css_valid());
    std::string why;
    REQUIRE(code.check_invariants(&why));
    auto [d, exact] = brute_force_distance(code, 3);
    REQUIRE(exact);
    REQUIRE(d == 3);
}

TEST_CASE("hypergraph product of [1] has no logical qubits", "[codes]") {
    auto one = BitMat::from_rows({"1"});
    auto code = hypergraph_product(one, one);
    REQUIRE(code.n_phys == 2);
    REQUIRE(code.k_logical == 0);
    REQUIRE_THROWS(brute_force_distance(code, 2));
    REQUIRE(code.logical_x.empty());
    REQUIRE(code.logical_z.empty());
    REQUIRE_THROWS(hypergraph_product(BitMat(), BitMat()));
}

TEST_CASE("hgp of random biregular checks", "[codes]") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        auto h = biregular_check(6, 8, 4, 3, seed);
        for (std::size_t i = 0; i < 6; ++i) REQUIRE(h.row(i).popcount() == 4);
        for (std::size_t j = 0; j < 8; ++j) {
            std::size_t c = 0;
            for (std::size_t i = 0; i < 6; ++i) c += h.get(i, j);
            REQUIRE(c == 3);
        }
        auto code = hypergraph_product(h, h);
        REQUIRE(code.n_phys == 100);
        REQUIRE(code.pcp.css_valid());
        std::string why;
        REQUIRE(code.check_invariants(&why));
        // sparsity: rows of H_X/H_Z have weight row_w + col_w
        auto [r, c] = code.sparsity();
        REQUIRE(r <= 4 + 3);
        REQUIRE(c <= 4);
    }
}

TEST_CASE("hgp dimension identity K = k^2 + kT^2", "[codes]") {
    auto rng = make_rng(61);
    for (int t = 0; t < 20; ++t) {
        std::size_t m = 2 + rng() % 3, n = m + 1 + rng() % 3;
        BitMat h(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rng() % 3 == 0) h.set(i, j, true);
        bool zero = true;
        for (std::size_t i = 0; i < m && zero; ++i) zero = !h.row(i).any();
        if (zero) h.set(0, 0, true);
        auto code = hypergraph_product(h, h);
        std::size_t rk = h.rank();
        std::size_t k = n - rk, kt = m - rk;
        REQUIRE(code.n_phys == n * n + m * m);
        REQUIRE(code.k_logical == k * k + kt * kt);
    }
}

TEST_CASE("logicals commute with all generators on steane", "[codes]") {
    auto code = steane();
    auto [lx, lz] = logicals_standard_form(code.pcp);
    REQUIRE(lx.size() == 1);
    for (std::size_t g = 0; g < 3; ++g) {
        REQUIRE(symplectic_inner(lx[0], code.x_generator(g)) == 0);
        REQUIRE(symplectic_inner(lx[0], code.z_generator(g)) == 0);
        REQUIRE(symplectic_inner(lz[0], code.x_generator(g)) == 0);
        REQUIRE(symplectic_inner(lz[0], code.z_generator(g)) == 0);
    }
    REQUIRE(symplectic_inner(lx[0], lz[0]) == 1);
}

TEST_CASE("steane logicals have weight 3", "[codes]") {
    auto code = steane();
    REQUIRE(weight(code.logical_x[0]) == 3);
    REQUIRE(weight(code.logical_z[0]) == 3);
}

TEST_CASE("logicals on [[13,1,3]] form one anticommuting pair", "[codes]") {
    auto rep = BitMat::from_rows({"110", "011"});
    auto code = hypergraph_product(rep, rep);
    auto [lx, lz] = logicals_standard_form(code.pcp);
    REQUIRE(lx.size() == 1);
    REQUIRE(symplectic_inner(lx[0], lz[0]) == 1);
}

TEST_CASE("select_code picks minimal member at least N_min", "[codes]") {
    LdpcFamily fam;
    fam.growth_beta = 1.0;
    for (std::size_t n : {std::size_t(13), std::size_t(52), std::size_t(113)})
        fam.members.push_back({n, [n]() {
                                   CssCode c;
                                   c.n_phys = n;
                                   return c;
                               }});
    // N_min = 20 -> the 52 member
    double cn = 20.0 / std::log(400.0 / 0.01);
    auto sel = select_code(fam, 400.0, 0.01, cn, 1.0);
    REQUIRE(sel.code.n_phys == 52);
    REQUIRE(sel.index == 1);
    REQUIRE(sel.n_min == Catch::Approx(20.0));

    // N_min <= 13 -> first member
    auto sel2 = select_code(fam, 400.0, 0.01, cn * 0.5, 1.0);
    REQUIRE(sel2.code.n_phys == 13);

    // N_min = 60 -> 113, and the beta growth chain N <= 2 c_N N_min fails
    double cn3 = 60.0 / std::log(400.0 / 0.01);
    auto sel3 = select_code(fam, 400.0, 0.01, cn3, 1.0);
    REQUIRE(sel3.code.n_phys == 113);
    REQUIRE_FALSE(sel3.growth_bound_ok);

    // exhausted / bad eps
    double cn4 = 200.0 / std::log(400.0 / 0.01);
    REQUIRE_THROWS(select_code(fam, 400.0, 0.01, cn4, 1.0));
    REQUIRE_THROWS(select_code(fam, 400.0, 0.0, cn, 1.0));
}

TEST_CASE("default family members are valid and ordered", "[codes]") {
    auto fam = default_ldpc_family(1, 2);
    REQUIRE(fam.members.size() == 3);
    REQUIRE(fam.members[0].n_phys == 13);
    REQUIRE(fam.members[1].n_phys == 100);
    REQUIRE(fam.members[2].n_phys == 225);
    for (std::size_t i = 1; i < fam.members.size(); ++i)
        REQUIRE(fam.members[i].n_phys > fam.members[i - 1].n_phys);
    auto c0 = fam.members[0].build();
    REQUIRE(c0.n_phys == 13);
    REQUIRE(c0.distance == 3);
}

TEST_CASE("code serialization round trip", "[codes]") {
    auto code = steane();
    std::stringstream ss;
    write_code(ss, code);
    auto back = read_code(ss);
    REQUIRE(back.n_phys == 7);
    REQUIRE(back.k_logical == 1);
    REQUIRE(back.pcp.h_x == code.pcp.h_x);
    REQUIRE(back.logical_x[0].x == code.logical_x[0].x);
    std::string why;
    REQUIRE(back.check_invariants(&why));

    std::stringstream bad("HX 101\n");
    REQUIRE_THROWS(read_code(bad));
}
