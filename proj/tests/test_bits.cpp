#include <catch2/catch_amalgamated.hpp>

#include "ftqc/bits.hpp"
#include "ftqc/rng.hpp"

using namespace ftqc;

TEST_CASE("bitvec basics", "[bits]") {
    BitVec v(130);
    REQUIRE(v.none());
    v.set(0, true);
    v.set(129, true);
    REQUIRE(v.popcount() == 2);
    REQUIRE(v.get(129));
    v.flip(129);
    REQUIRE(v.popcount() == 1);
    REQUIRE(v.first_set().value() == 0);

    auto w = BitVec::from_string("1011");
    REQUIRE(w.to_string() == "1011");
    REQUIRE(w.support() == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("bitvec xor and dot", "[bits]") {
    auto a = BitVec::from_string("1100");
    auto b = BitVec::from_string("1010");
    REQUIRE((a ^ b).to_string() == "0110");
    REQUIRE(a.dot(b) == true);  // overlap {0}
    REQUIRE(a.dot(a) == false); // even overlap with itself? 2 bits -> 0
}

TEST_CASE("row reduce and rank", "[bits]") {
    auto m = BitMat::from_rows({"1010101", "0110011", "0001111"});
    REQUIRE(m.rank() == 3);
    auto k = m.kernel_basis();
    REQUIRE(k.size() == 4);
    for (const auto& v : k) REQUIRE(m.mul_right(v).none());
}

TEST_CASE("kernel of identity is empty", "[bits]") {
    auto m = BitMat::identity(5);
    REQUIRE(m.kernel_basis().empty());
    REQUIRE(m.rank() == 5);
}

TEST_CASE("solve_left finds preimages", "[bits]") {
    auto m = BitMat::from_rows({"110", "011"});
    // x * m = b
    auto x = m.solve_left(BitVec::from_string("101"));
    REQUIRE(x.has_value());
    REQUIRE(m.mul_left(*x) == BitVec::from_string("101"));
    auto bad = m.solve_left(BitVec::from_string("111"));
    REQUIRE_FALSE(bad.has_value());
}

TEST_CASE("in_row_space / reduce_mod_rows", "[bits]") {
    auto m = BitMat::from_rows({"1010101", "0110011", "0001111"});
    REQUIRE(m.in_row_space(BitVec::from_string("1100110")));
    REQUIRE_FALSE(m.in_row_space(BitVec::from_string("1000000")));
    auto r = m.reduce_mod_rows(BitVec::from_string("1010101"));
    REQUIRE(r.none());
}

TEST_CASE("random matrix rank matches kernel dimension", "[bits]") {
    auto rng = make_rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t rows = 4 + rng() % 5, cols = 4 + rng() % 7;
        BitMat m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                if (rng() & 1) m.set(i, j, true);
        REQUIRE(m.rank() + m.kernel_basis().size() == cols);
    }
}

TEST_CASE("geometric skip statistics", "[bits]") {
    auto rng = make_rng(11);
    double p = 0.1;
    std::size_t hits = 0, samples = 200000;
    double total = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        uint64_t g = geometric_skip(rng, p);
        total += double(g);
        if (g == 0) ++hits;
    }
    // P[gap = 0] = p, E[gap] = (1-p)/p = 9
    REQUIRE(std::abs(double(hits) / double(samples) - p) < 0.01);
    REQUIRE(std::abs(total / double(samples) - 9.0) < 0.2);
}
