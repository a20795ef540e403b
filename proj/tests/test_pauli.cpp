#include <catch2/catch_amalgamated.hpp>

#include "ftqc/dense_sim.hpp"
#include "ftqc/pauli.hpp"
#include "ftqc/rng.hpp"

using namespace ftqc;
using cplx = std::complex<double>;

namespace {

// dense product of representative values, the independent oracle
std::vector<std::vector<cplx>> matmul(const std::vector<std::vector<cplx>>& a,
                                      const std::vector<std::vector<cplx>>& b) {
    std::size_t n = a.size();
    std::vector<std::vector<cplx>> c(n, std::vector<cplx>(n, cplx(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k] != cplx(0))
                for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

bool mat_equal(const std::vector<std::vector<cplx>>& a, const std::vector<std::vector<cplx>>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(a[i][j] - b[i][j]) > 1e-12) return false;
    return true;
}

PauliWord random_word(std::size_t n, std::mt19937_64& rng) {
    PauliWord p(n);
    for (std::size_t q = 0; q < n; ++q) {
        p.x.set(q, rng() & 1);
        p.z.set(q, rng() & 1);
    }
    p.sign = rng() & 1;
    return p;
}

}  // namespace

TEST_CASE("symplectic mapping rules", "[pauli]") {
    REQUIRE(PauliWord::parse("X").symplectic() == BitVec::from_string("10"));
    REQUIRE(PauliWord::parse("Z").symplectic() == BitVec::from_string("01"));
    REQUIRE(PauliWord::parse("Y").symplectic() == BitVec::from_string("11"));
    REQUIRE(PauliWord::parse("I").symplectic() == BitVec::from_string("00"));
    REQUIRE(PauliWord::parse("-XIZ").sign);
    REQUIRE(PauliWord::parse("-XIZ").to_string() == "-XIZ");
}

TEST_CASE("X times Z gives the ZX representative", "[pauli]") {
    auto r = pauli_mul(PauliWord::parse("X"), PauliWord::parse("Z"));
    REQUIRE(r.symplectic() == BitVec::from_string("11"));
}

TEST_CASE("P times P is the identity word", "[pauli]") {
    auto rng = make_rng(3);
    for (int t = 0; t < 50; ++t) {
        auto p = random_word(1 + rng() % 8, rng);
        auto r = pauli_mul(p, p);
        // self-inverse over F2; the representative (ZX)^2 = -I contributes
        // one -1 per Y position, which the exact dense-product test pins
        REQUIRE(r.symplectic().none());
        REQUIRE(r.sign == ((p.x & p.z).popcount() % 2 == 1));
        auto q = p;
        q.sign = !p.sign;
        REQUIRE(pauli_mul(p, q).symplectic().none());
    }
}

TEST_CASE("pauli_mul matches the dense matrix product exactly", "[pauli]") {
    auto rng = make_rng(5);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int t = 0; t < 40; ++t) {
            auto a = random_word(n, rng), b = random_word(n, rng);
            auto prod = pauli_mul(a, b);
            auto oracle = matmul(DenseSim::pauli_matrix(a), DenseSim::pauli_matrix(b));
            REQUIRE(mat_equal(DenseSim::pauli_matrix(prod), oracle));
        }
    }
}

TEST_CASE("pauli_mul is associative with identity neutral", "[pauli]") {
    // exhaustive at n = 1 (including signs), randomized at larger n
    for (int sa = 0; sa < 2; ++sa)
        for (int a = 0; a < 4; ++a)
            for (int sb = 0; sb < 2; ++sb)
                for (int b = 0; b < 4; ++b)
                    for (int c = 0; c < 4; ++c) {
                        PauliWord A(1), B(1), C(1);
                        A.x.set(0, a & 1), A.z.set(0, a >> 1), A.sign = sa;
                        B.x.set(0, b & 1), B.z.set(0, b >> 1), B.sign = sb;
                        C.x.set(0, c & 1), C.z.set(0, c >> 1);
                        REQUIRE(pauli_mul(pauli_mul(A, B), C) == pauli_mul(A, pauli_mul(B, C)));
                    }
    auto rng = make_rng(9);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng() % 64;
        auto A = random_word(n, rng), B = random_word(n, rng), C = random_word(n, rng);
        REQUIRE(pauli_mul(pauli_mul(A, B), C) == pauli_mul(A, pauli_mul(B, C)));
        REQUIRE(pauli_mul(A, PauliWord::identity(n)) == A);
        REQUIRE(pauli_mul(PauliWord::identity(n), A) == A);
    }
}

TEST_CASE("symplectic inner product", "[pauli]") {
    REQUIRE(symplectic_inner(PauliWord::parse("X"), PauliWord::parse("Z")) == 1);
    auto rng = make_rng(13);
    for (int t = 0; t < 50; ++t) {
        auto p = random_word(1 + rng() % 10, rng);
        REQUIRE(symplectic_inner(p, p) == 0);
    }
}

TEST_CASE("inner product matches the dense commutator", "[pauli]") {
    auto rng = make_rng(17);
    for (std::size_t n = 1; n <= 3; ++n)
        for (int t = 0; t < 40; ++t) {
            auto a = random_word(n, rng), b = random_word(n, rng);
            auto ab = matmul(DenseSim::pauli_matrix(a), DenseSim::pauli_matrix(b));
            auto ba = matmul(DenseSim::pauli_matrix(b), DenseSim::pauli_matrix(a));
            bool anti = !mat_equal(ab, ba);
            REQUIRE(symplectic_inner(a, b) == (anti ? 1 : 0));
        }
}

TEST_CASE("inner product symmetric and bilinear", "[pauli]") {
    auto rng = make_rng(19);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + rng() % 16;
        auto a = random_word(n, rng), b = random_word(n, rng), c = random_word(n, rng);
        REQUIRE(symplectic_inner(a, b) == symplectic_inner(b, a));
        REQUIRE(symplectic_inner(pauli_mul(a, b), c) == (symplectic_inner(a, c) ^ symplectic_inner(b, c)));
    }
}

TEST_CASE("weight", "[pauli]") {
    REQUIRE(weight(PauliWord::identity(5)) == 0);
    REQUIRE(weight(PauliWord::parse("IYI")) == 1);
    auto rng = make_rng(23);
    for (int t = 0; t < 50; ++t) {
        auto p = random_word(1 + rng() % 40, rng);
        std::size_t w = 0;
        for (std::size_t q = 0; q < p.n; ++q)
            if (p.x.get(q) || p.z.get(q)) ++w;
        REQUIRE(weight(p) == w);
    }
}

TEST_CASE("length mismatch rejected", "[pauli]") {
    REQUIRE_THROWS(pauli_mul(PauliWord::identity(2), PauliWord::identity(3)));
    REQUIRE_THROWS(symplectic_inner(PauliWord::identity(2), PauliWord::identity(3)));
}
