#pragma once

// Aaronson-Gottesman style stabilizer tableau with destabilizers. Rows are
// kept in the xz-encoding i^{phase} X^x Z^z (phase mod 4), bit-packed.
// Used as the exact reference for every Clifford code path and as the
// engine behind gadget checks and logical-state extraction.

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ftqc/clifford.hpp"

namespace ftqc {

inline bool symplectic_inner_bits(const BitVec& a, const BitVec& b) {
    std::size_t n = a.size() / 2;
    bool acc = false;
    for (std::size_t i = 0; i < n; ++i)
        acc ^= (a.get(i) & b.get(n + i)) ^ (b.get(i) & a.get(n + i));
    return acc;
}

class TableauSim {
  public:
    explicit TableauSim(std::size_t n) : n_(n) {
        rows_.reserve(2 * n);
        phase_.assign(2 * n, 0);
        for (std::size_t i = 0; i < n; ++i) {  // destabilizers X_i
            BitVec v(2 * n);
            v.set(i, true);
            rows_.push_back(std::move(v));
        }
        for (std::size_t i = 0; i < n; ++i) {  // stabilizers Z_i
            BitVec v(2 * n);
            v.set(n + i, true);
            rows_.push_back(std::move(v));
        }
    }

    std::size_t num_qubits() const { return n_; }

    void apply(const GateOp& op) {
        for (std::size_t j = 0; j < 2 * n_; ++j) gate_row(rows_[j], phase_[j], op);
    }

    void apply_pauli_frame(const PauliWord& p) {
        // A Pauli gate only flips stabilizer signs.
        for (std::size_t j = 0; j < 2 * n_; ++j) {
            bool anti = symplectic_inner_bits(rows_[j], p.symplectic());
            if (anti) phase_[j] = uint8_t((phase_[j] + 2) & 3);
        }
    }

    // Measure Z_q. If `forced` is given, project on that outcome; when the
    // forced outcome has probability zero, returns nullopt.
    std::optional<bool> measure_z(std::size_t q, std::mt19937_64* rng, std::optional<bool> forced = std::nullopt) {
        std::size_t p = 2 * n_;
        for (std::size_t i = n_; i < 2 * n_; ++i)
            if (rows_[i].get(q)) { p = i; break; }
        if (p != 2 * n_) {
            // random outcome
            bool out;
            if (forced)
                out = *forced;
            else
                out = (std::uniform_int_distribution<int>(0, 1)(*rng) != 0);
            for (std::size_t i = 0; i < 2 * n_; ++i)
                if (i != p && rows_[i].get(q)) row_mul(i, p);
            rows_[p - n_] = rows_[p];
            phase_[p - n_] = phase_[p];
            BitVec zq(2 * n_);
            zq.set(n_ + q, true);
            rows_[p] = zq;
            phase_[p] = uint8_t(out ? 2 : 0);
            return out;
        }
        // deterministic
        BitVec acc(2 * n_);
        uint8_t aph = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (rows_[i].get(q)) imul(acc, aph, rows_[n_ + i], phase_[n_ + i]);
        bool out = hermitian_sign(acc, aph);
        if (forced && *forced != out) return std::nullopt;
        return out;
    }

    double prob_one(std::size_t q) const {
        for (std::size_t i = n_; i < 2 * n_; ++i)
            if (rows_[i].get(q)) return 0.5;
        BitVec acc(2 * n_);
        uint8_t aph = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (rows_[i].get(q)) imul(acc, aph, rows_[n_ + i], phase_[n_ + i]);
        return hermitian_sign(acc, aph) ? 1.0 : 0.0;
    }

    void reset_zero(std::size_t q, std::mt19937_64* rng) {
        auto out = measure_z(q, rng);
        if (out && *out) apply({Gate::X, q});
    }

    // Expectation of the Hermitian word (-1)^{p.sign} (x) {I,X,Y,Z}:
    // +1 / -1 if determined, 0 if the outcome would be random.
    int expectation(const PauliWord& p) const {
        if (p.n != n_) throw std::invalid_argument("tableau: expectation dimension mismatch");
        BitVec pb = p.symplectic();
        for (std::size_t i = n_; i < 2 * n_; ++i)
            if (symplectic_inner_bits(rows_[i], pb)) return 0;
        BitVec acc(2 * n_);
        uint8_t aph = 0;
        for (std::size_t i = 0; i < n_; ++i)
            if (symplectic_inner_bits(rows_[i], pb)) imul(acc, aph, rows_[n_ + i], phase_[n_ + i]);
        if (!(acc == pb)) throw std::logic_error("tableau: operator not in stabilizer span");
        bool neg = hermitian_sign(acc, aph);
        return (neg == p.sign) ? +1 : -1;
    }

    // Canonical stabilizer generators (RREF over [x|z] with signs), usable
    // for exact state equality.
    std::vector<PauliWord> canonical_stabilizers() const {
        std::vector<BitVec> rows;
        std::vector<uint8_t> phases;
        for (std::size_t i = n_; i < 2 * n_; ++i) {
            rows.push_back(rows_[i]);
            phases.push_back(phase_[i]);
        }
        std::size_t r = 0;
        for (std::size_t c = 0; c < 2 * n_ && r < rows.size(); ++c) {
            std::size_t sel = r;
            while (sel < rows.size() && !rows[sel].get(c)) ++sel;
            if (sel == rows.size()) continue;
            std::swap(rows[r], rows[sel]);
            std::swap(phases[r], phases[sel]);
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (i != r && rows[i].get(c)) imul(rows[i], phases[i], rows[r], phases[r]);
            ++r;
        }
        std::vector<PauliWord> out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            PauliWord w = PauliWord::from_symplectic(rows[i]);
            w.sign = hermitian_sign(rows[i], phases[i]);
            out.push_back(w);
        }
        return out;
    }

    bool same_state(const TableauSim& other) const {
        if (n_ != other.n_) return false;
        auto a = canonical_stabilizers();
        auto b = other.canonical_stabilizers();
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!(a[i] == b[i])) return false;
        return true;
    }

    // Hermitian sign of row value i^{ph} X^x Z^z; requires ph = ycount mod 2.
    static bool hermitian_sign(const BitVec& bits, uint8_t ph) {
        std::size_t n = bits.size() / 2;
        int y = 0;
        for (std::size_t i = 0; i < n; ++i) y += int(bits.get(i) & bits.get(n + i));
        int r = (int(ph) - y) & 3;
        if (r & 1) throw std::logic_error("tableau: non-Hermitian row sign requested");
        return r == 2;
    }

    // conjugate one xz-encoded row by a Clifford gate (shared with the
    // encoder synthesis sweeps)
    static void imulgate(BitVec& r, uint8_t& ph, const GateOp& op) { gate_row(r, ph, op); }

    static void imul(BitVec& abits, uint8_t& aph, const BitVec& bbits, uint8_t bph) {
        std::size_t n = abits.size() / 2;
        int swaps = 0;
        for (std::size_t i = 0; i < n; ++i) swaps ^= int(abits.get(n + i) & bbits.get(i));
        aph = uint8_t((aph + bph + 2 * swaps) & 3);
        abits ^= bbits;
    }

  private:
    std::size_t n_;
    std::vector<BitVec> rows_;    // 0..n-1 destabilizers, n..2n-1 stabilizers
    std::vector<uint8_t> phase_;

    void row_mul(std::size_t i, std::size_t j) { imul(rows_[i], phase_[i], rows_[j], phase_[j]); }

  public:
    static void gate_row(BitVec& r, uint8_t& ph, const GateOp& op) {
        std::size_t n = r.size() / 2;
        std::size_t q = op.q0, t = op.q1;
        bool xq = r.get(q), zq = r.get(n + q);
        switch (op.g) {
            case Gate::I: break;
            case Gate::H:
                r.set(q, zq);
                r.set(n + q, xq);
                if (xq && zq) ph = uint8_t((ph + 2) & 3);
                break;
            case Gate::S:
                if (xq) {
                    ph = uint8_t((ph + 1) & 3);
                    r.flip(n + q);
                }
                break;
            case Gate::Sdg:
                if (xq) {
                    ph = uint8_t((ph + 3) & 3);
                    r.flip(n + q);
                }
                break;
            case Gate::X:
                if (zq) ph = uint8_t((ph + 2) & 3);
                break;
            case Gate::Y:
                if (xq != zq) ph = uint8_t((ph + 2) & 3);
                break;
            case Gate::Z:
                if (xq) ph = uint8_t((ph + 2) & 3);
                break;
            case Gate::CNOT: {
                bool xc = r.get(q), zt = r.get(n + t);
                if (xc) r.flip(t);
                if (zt) r.flip(n + q);
                break;
            }
            case Gate::CZ: {
                bool xa = r.get(q), xb = r.get(t);
                if (xb) r.flip(n + q);
                if (xa) r.flip(n + t);
                if (xa && xb) ph = uint8_t((ph + 2) & 3);
                break;
            }
            default: throw std::invalid_argument("tableau: non-Clifford gate");
        }
    }
};

}  // namespace ftqc
