#include <catch2/catch_amalgamated.hpp>

#include "ftqc/clifford.hpp"
#include "ftqc/dense_sim.hpp"
#include "ftqc/rng.hpp"

using namespace ftqc;
using cplx = std::complex<double>;

namespace {

std::vector<std::vector<cplx>> gate_matrix(std::size_t n, const GateOp& op) {
    std::size_t dim = std::size_t(1) << n;
    std::vector<std::vector<cplx>> m(dim, std::vector<cplx>(dim, cplx(0)));
    for (std::size_t col = 0; col < dim; ++col) {
        DenseSim s(n);
        // build basis state |col>
        std::vector<cplx> amps(dim, cplx(0));
        amps[col] = cplx(1);
        DenseSim t(n);
        // apply gate to basis state by simulating via X preps
        // (DenseSim starts in |0..0>; set bits with X gates)
        for (std::size_t q = 0; q < n; ++q)
            if (col & (std::size_t(1) << q)) t.apply({Gate::X, q});
        t.apply(op);
        for (std::size_t row = 0; row < dim; ++row) m[row][col] = t.amplitudes()[row];
    }
    return m;
}

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

std::vector<std::vector<cplx>> dagger(const std::vector<std::vector<cplx>>& a) {
    std::size_t n = a.size();
    std::vector<std::vector<cplx>> d(n, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::conj(a[j][i]);
    return d;
}

// true if a == phase * b for some unit phase
bool proportional(const std::vector<std::vector<cplx>>& a, const std::vector<std::vector<cplx>>& b) {
    cplx ratio(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (std::abs(b[i][j]) > 1e-9) {
                ratio = a[i][j] / b[i][j];
                goto found;
            }
            if (std::abs(a[i][j]) > 1e-9) return false;
        }
found:
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(a[i][j] - ratio * b[i][j]) > 1e-9) return false;
    return true;
}

std::vector<GateOp> random_gates(std::size_t n, std::size_t len, std::mt19937_64& rng) {
    static const Gate pool[] = {Gate::H, Gate::S, Gate::Sdg, Gate::X, Gate::Y, Gate::Z, Gate::CNOT, Gate::CZ};
    std::vector<GateOp> gs;
    for (std::size_t i = 0; i < len; ++i) {
        Gate g = pool[rng() % 8];
        if (gate_is_two_qubit(g) && n < 2) {
            g = Gate::H;
        }
        GateOp op{g, rng() % n, 0};
        if (gate_is_two_qubit(g)) {
            do {
                op.q1 = rng() % n;
            } while (op.q1 == op.q0);
        }
        gs.push_back(op);
    }
    return gs;
}

}  // namespace

TEST_CASE("empty sequence gives the identity map", "[clifford]") {
    auto c = clifford_from_gates(3, {});
    REQUIRE(c.gamma() == BitMat::identity(6));
    REQUIRE(c.sign_shift().none());
    REQUIRE(c.is_symplectic());
}

TEST_CASE("H swaps X and Z", "[clifford]") {
    auto c = clifford_from_gates(1, {{Gate::H, 0}});
    auto px = conjugate(PauliWord::parse("X"), c);
    auto pz = conjugate(PauliWord::parse("Z"), c);
    REQUIRE(px.equals_projective(PauliWord::parse("Z")));
    REQUIRE(pz.equals_projective(PauliWord::parse("X")));
    REQUIRE_FALSE(px.sign);
    REQUIRE_FALSE(pz.sign);
}

TEST_CASE("CNOT propagates X from control", "[clifford]") {
    auto c = clifford_from_gates(2, {{Gate::CNOT, 0, 1}});
    auto p = conjugate(PauliWord::parse("XI"), c);
    REQUIRE(p.equals_projective(PauliWord::parse("XX")));
}

TEST_CASE("identity map leaves words unchanged", "[clifford]") {
    auto c = clifford_from_gates(4, {});
    auto rng = make_rng(31);
    for (int t = 0; t < 20; ++t) {
        PauliWord p(4);
        for (std::size_t q = 0; q < 4; ++q) {
            p.x.set(q, rng() & 1);
            p.z.set(q, rng() & 1);
        }
        p.sign = rng() & 1;
        REQUIRE(conjugate(p, c) == p);
    }
}

TEST_CASE("gamma is always symplectic", "[clifford]") {
    auto rng = make_rng(37);
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 1 + rng() % 4;
        auto c = clifford_from_gates(n, random_gates(n, 12, rng));
        REQUIRE(c.is_symplectic());
    }
}

TEST_CASE("conjugation matches dense CPC^dag up to phase", "[clifford]") {
    auto rng = make_rng(41);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int t = 0; t < 25; ++t) {
            auto gates = random_gates(n, 10, rng);
            auto c = clifford_from_gates(n, gates);
            PauliWord p(n);
            for (std::size_t q = 0; q < n; ++q) {
                p.x.set(q, rng() & 1);
                p.z.set(q, rng() & 1);
            }
            auto img = conjugate(p, c);

            std::size_t dim = std::size_t(1) << n;
            std::vector<std::vector<cplx>> u(dim, std::vector<cplx>(dim, cplx(0)));
            for (std::size_t i = 0; i < dim; ++i) u[i][i] = cplx(1);
            for (const auto& g : gates) u = matmul(gate_matrix(n, g), u);
            auto cpc = matmul(matmul(u, DenseSim::pauli_matrix(p)), dagger(u));
            REQUIRE(proportional(cpc, DenseSim::pauli_matrix(img)));
        }
    }
}

TEST_CASE("conjugation preserves the symplectic inner product", "[clifford]") {
    auto rng = make_rng(43);
    for (int t = 0; t < 40; ++t) {
        std::size_t n = 1 + rng() % 5;
        auto c = clifford_from_gates(n, random_gates(n, 15, rng));
        PauliWord a(n), b(n);
        for (std::size_t q = 0; q < n; ++q) {
            a.x.set(q, rng() & 1), a.z.set(q, rng() & 1);
            b.x.set(q, rng() & 1), b.z.set(q, rng() & 1);
        }
        REQUIRE(symplectic_inner(a, b) == symplectic_inner(conjugate(a, c), conjugate(b, c)));
    }
}

TEST_CASE("composition order matches circuit order", "[clifford]") {
    auto rng = make_rng(47);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = 2 + rng() % 3;
        auto g1 = random_gates(n, 6, rng), g2 = random_gates(n, 6, rng);
        auto c1 = clifford_from_gates(n, g1);
        auto c2 = clifford_from_gates(n, g2);
        auto all = g1;
        all.insert(all.end(), g2.begin(), g2.end());
        auto whole = clifford_from_gates(n, all);
        auto comp = c1.then(c2);
        REQUIRE(comp.gamma() == whole.gamma());
        REQUIRE(comp.sign_shift() == whole.sign_shift());
    }
}

TEST_CASE("index out of range rejected", "[clifford]") {
    CliffordMap c(2);
    REQUIRE_THROWS(c.apply_gate({Gate::H, 5}));
    REQUIRE_THROWS(c.apply_gate({Gate::CNOT, 0, 7}));
}
