#pragma once

// Small dense statevector engine. Reference oracle only: exact amplitudes,
// supports the non-Clifford T/Tdg gates. Hard-capped at 16 qubits (65536
// amplitudes); the public dense_reference entry point enforces the tighter
// documented cap.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "ftqc/clifford.hpp"

namespace ftqc {

class DenseSim {
  public:
    static constexpr std::size_t kMaxQubits = 16;
    using cplx = std::complex<double>;

    explicit DenseSim(std::size_t n) : n_(n) {
        if (n > kMaxQubits) throw std::invalid_argument("dense: qubit cap exceeded");
        amps_.assign(std::size_t(1) << n, cplx(0, 0));
        amps_[0] = cplx(1, 0);
    }

    std::size_t num_qubits() const { return n_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    void apply(const GateOp& op) {
        switch (op.g) {
            case Gate::I: break;
            case Gate::X: apply1(op.q0, {cplx(0), cplx(1), cplx(1), cplx(0)}); break;
            case Gate::Y: apply1(op.q0, {cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}); break;
            case Gate::Z: apply1(op.q0, {cplx(1), cplx(0), cplx(0), cplx(-1)}); break;
            case Gate::H: {
                double s = 1.0 / std::sqrt(2.0);
                apply1(op.q0, {cplx(s), cplx(s), cplx(s), cplx(-s)});
                break;
            }
            case Gate::S: apply1(op.q0, {cplx(1), cplx(0), cplx(0), cplx(0, 1)}); break;
            case Gate::Sdg: apply1(op.q0, {cplx(1), cplx(0), cplx(0), cplx(0, -1)}); break;
            case Gate::T: apply1(op.q0, {cplx(1), cplx(0), cplx(0), std::polar(1.0, M_PI / 4)}); break;
            case Gate::Tdg: apply1(op.q0, {cplx(1), cplx(0), cplx(0), std::polar(1.0, -M_PI / 4)}); break;
            case Gate::CNOT: {
                std::size_t c = op.q0, t = op.q1;
                std::size_t cm = std::size_t(1) << c, tm = std::size_t(1) << t;
                for (std::size_t i = 0; i < amps_.size(); ++i)
                    if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
                break;
            }
            case Gate::CZ: {
                std::size_t am = std::size_t(1) << op.q0, bm = std::size_t(1) << op.q1;
                for (std::size_t i = 0; i < amps_.size(); ++i)
                    if ((i & am) && (i & bm)) amps_[i] = -amps_[i];
                break;
            }
        }
    }

    void apply_pauli(const PauliWord& p) {
        for (std::size_t q = 0; q < p.n; ++q) {
            if (p.z.get(q)) apply({Gate::Z, q});
            if (p.x.get(q)) apply({Gate::X, q});
        }
        if (p.sign)
            for (auto& a : amps_) a = -a;
    }

    // |T> = TH|0> up to global phase
    void prep_t(std::size_t q) {
        reset_zero(q);
        apply({Gate::H, q});
        apply({Gate::T, q});
    }

    void reset_zero(std::size_t q) {
        std::size_t m = std::size_t(1) << q;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if (i & m) amps_[i] = cplx(0, 0);
        normalize();
    }

    double prob_one(std::size_t q) const {
        std::size_t m = std::size_t(1) << q;
        double p = 0;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if (i & m) p += std::norm(amps_[i]);
        return p;
    }

    // Project onto outcome and renormalize; returns outcome probability.
    double project(std::size_t q, bool outcome) {
        std::size_t m = std::size_t(1) << q;
        double p = 0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            bool one = (i & m) != 0;
            if (one == outcome)
                p += std::norm(amps_[i]);
            else
                amps_[i] = cplx(0, 0);
        }
        if (p > 0) {
            double s = 1.0 / std::sqrt(p);
            for (auto& a : amps_) a *= s;
        }
        return p;
    }

    bool measure(std::size_t q, std::mt19937_64& rng) {
        double p1 = prob_one(q);
        bool out = std::uniform_real_distribution<double>(0, 1)(rng) < p1;
        project(q, out);
        return out;
    }

    // |<this|other>|^2, ignoring global phase by construction.
    double fidelity(const DenseSim& other) const {
        if (amps_.size() != other.amps_.size()) throw std::invalid_argument("dense: size mismatch");
        cplx ov(0, 0);
        for (std::size_t i = 0; i < amps_.size(); ++i) ov += std::conj(amps_[i]) * other.amps_[i];
        return std::norm(ov);
    }

    // Probability distribution of measuring all qubits in Z basis.
    std::vector<double> z_distribution() const {
        std::vector<double> d(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) d[i] = std::norm(amps_[i]);
        return d;
    }

    // Marginal distribution over a subset of qubits (bit i of outcome index
    // corresponds to qs[i]).
    std::vector<double> z_distribution(const std::vector<std::size_t>& qs) const {
        std::vector<double> d(std::size_t(1) << qs.size(), 0.0);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            std::size_t key = 0;
            for (std::size_t k = 0; k < qs.size(); ++k)
                if (i & (std::size_t(1) << qs[k])) key |= std::size_t(1) << k;
            d[key] += std::norm(amps_[i]);
        }
        return d;
    }

    void normalize() {
        double p = 0;
        for (const auto& a : amps_) p += std::norm(a);
        if (p > 0) {
            double s = 1.0 / std::sqrt(p);
            for (auto& a : amps_) a *= s;
        }
    }

    // Dense matrix of a PauliWord's representative value, for the oracle
    // tests of pauli_mul (exact, including sign).
    static std::vector<std::vector<cplx>> pauli_matrix(const PauliWord& p) {
        std::size_t dim = std::size_t(1) << p.n;
        std::vector<std::vector<cplx>> m(dim, std::vector<cplx>(dim, cplx(0, 0)));
        for (std::size_t col = 0; col < dim; ++col) {
            // value = (-1)^sign prod_j Z^{z_j} X^{x_j}; X applied first.
            std::size_t row = col;
            cplx v = p.sign ? cplx(-1) : cplx(1);
            for (std::size_t q = 0; q < p.n; ++q) {
                std::size_t m_q = std::size_t(1) << q;
                if (p.x.get(q)) row ^= m_q;
                if (p.z.get(q) && (row & m_q)) v = -v;
            }
            m[row][col] = v;
        }
        return m;
    }

  private:
    std::size_t n_;
    std::vector<cplx> amps_;

    void apply1(std::size_t q, const std::array<cplx, 4>& u) {
        std::size_t m = std::size_t(1) << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & m) continue;
            cplx a0 = amps_[i], a1 = amps_[i | m];
            amps_[i] = u[0] * a0 + u[1] * a1;
            amps_[i | m] = u[2] * a0 + u[3] * a1;
        }
    }
};

}  // namespace ftqc
