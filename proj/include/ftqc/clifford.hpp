#pragma once

// Binary symplectic matrices of Clifford representatives with sign tracking.
//
// A CliffordMap stores, for each generator X_1..X_n, Z_1..Z_n, the image
// under conjugation. Rows are kept internally in the xz-encoding
// i^{phase} * X^x Z^z (phase mod 4), which is closed under every update;
// the public gamma() matrix is the 2n x 2n bit matrix of row vectors
// [x, z], so conjugation is phi(P) -> phi(P) * gamma. sign_shift() exposes
// the folded real sign of each image (a +-i phase on the ZX representative
// is dropped; see pauli.hpp for the representative convention).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ftqc/pauli.hpp"

namespace ftqc {

enum class Gate : uint8_t { I, X, Y, Z, H, S, Sdg, CNOT, CZ, T, Tdg };

inline bool gate_is_clifford(Gate g) { return g != Gate::T && g != Gate::Tdg; }
inline bool gate_is_two_qubit(Gate g) { return g == Gate::CNOT || g == Gate::CZ; }

inline const char* gate_name(Gate g) {
    switch (g) {
        case Gate::I: return "I";
        case Gate::X: return "X";
        case Gate::Y: return "Y";
        case Gate::Z: return "Z";
        case Gate::H: return "H";
        case Gate::S: return "S";
        case Gate::Sdg: return "Sdg";
        case Gate::CNOT: return "CNOT";
        case Gate::CZ: return "CZ";
        case Gate::T: return "T";
        case Gate::Tdg: return "Tdg";
    }
    return "?";
}

struct GateOp {
    Gate g;
    std::size_t q0 = 0;
    std::size_t q1 = 0;  // used by CNOT (control=q0, target=q1) and CZ
};

class CliffordMap {
  public:
    CliffordMap() = default;

    explicit CliffordMap(std::size_t n) : n_(n) {
        rows_.reserve(2 * n);
        phase_.assign(2 * n, 0);
        for (std::size_t j = 0; j < 2 * n; ++j) {
            BitVec v(2 * n);
            v.set(j, true);
            rows_.push_back(std::move(v));
        }
    }

    std::size_t num_qubits() const { return n_; }

    // row j < n: image of X_j; row n+j: image of Z_j. Bits are [x | z].
    const BitVec& row(std::size_t j) const { return rows_[j]; }
    uint8_t row_phase(std::size_t j) const { return phase_[j]; }

    BitMat gamma() const {
        BitMat g(2 * n_, 2 * n_);
        for (std::size_t j = 0; j < 2 * n_; ++j) g.row(j) = rows_[j];
        return g;
    }

    // Folded real sign of each generator image (see header comment).
    BitVec sign_shift() const {
        BitVec s(2 * n_);
        for (std::size_t j = 0; j < 2 * n_; ++j) s.set(j, fold_sign(rows_[j], phase_[j]));
        return s;
    }

    void apply_gate(const GateOp& op) {
        if (op.q0 >= n_ || (gate_is_two_qubit(op.g) && op.q1 >= n_))
            throw std::out_of_range("clifford: qubit index out of range");
        if (!gate_is_clifford(op.g)) throw std::invalid_argument("clifford: non-Clifford gate");
        for (std::size_t j = 0; j < 2 * n_; ++j) apply_gate_row(rows_[j], phase_[j], op);
    }

    static CliffordMap from_gates(std::size_t n, const std::vector<GateOp>& gates) {
        CliffordMap c(n);
        for (const auto& g : gates) c.apply_gate(g);
        return c;
    }

    // this followed by other (circuit order).
    CliffordMap then(const CliffordMap& other) const {
        if (n_ != other.n_) throw std::invalid_argument("clifford: size mismatch");
        CliffordMap r(n_);
        for (std::size_t j = 0; j < 2 * n_; ++j) {
            auto [bits, ph] = other.conj_internal(rows_[j], phase_[j]);
            r.rows_[j] = std::move(bits);
            r.phase_[j] = ph;
        }
        return r;
    }

    // Embed an m-qubit map into n qubits at the given qubit positions.
    static CliffordMap embed(const CliffordMap& small, std::size_t n, const std::vector<std::size_t>& at) {
        if (at.size() != small.num_qubits()) throw std::invalid_argument("clifford: embed arity");
        CliffordMap big(n);
        std::size_t m = small.num_qubits();
        for (std::size_t j = 0; j < m; ++j) {
            big.rows_[at[j]] = expand_bits(small.rows_[j], n, at);
            big.phase_[at[j]] = small.phase_[j];
            big.rows_[n + at[j]] = expand_bits(small.rows_[m + j], n, at);
            big.phase_[n + at[j]] = small.phase_[m + j];
        }
        return big;
    }

    bool is_symplectic() const {
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            for (std::size_t j = i; j < 2 * n_; ++j) {
                bool want = (j == i + n_);  // inner(X_i, Z_i) = 1, else 0
                if (sym_inner(rows_[i], rows_[j]) != want) return false;
            }
        }
        return true;
    }

    PauliWord conjugate(const PauliWord& p) const {
        if (p.n != n_) throw std::invalid_argument("conjugate: dimension mismatch");
        // public (-1)^s Z^z X^x = i^{2s + 2 x.z} X^x Z^z
        uint8_t ph = uint8_t((2 * (p.sign ? 1 : 0) + 2 * (p.x.dot(p.z) ? 1 : 0)) & 3);
        auto [bits, ph2] = conj_internal(p.symplectic(), ph);
        PauliWord r = PauliWord::from_symplectic(bits);
        r.sign = fold_sign(bits, ph2);
        return r;
    }

  private:
    std::size_t n_ = 0;
    std::vector<BitVec> rows_;   // [x | z] bit rows, length 2n each
    std::vector<uint8_t> phase_;  // i^phase in the xz-encoding

    static bool sym_inner(const BitVec& a, const BitVec& b) {
        std::size_t n = a.size() / 2;
        bool acc = false;
        // x_a . z_b + x_b . z_a without materializing slices
        for (std::size_t i = 0; i < n; ++i)
            acc ^= (a.get(i) & b.get(n + i)) ^ (b.get(i) & a.get(n + i));
        return acc;
    }

    static bool fold_sign(const BitVec& bits, uint8_t ph) {
        std::size_t n = bits.size() / 2;
        int y = 0;
        for (std::size_t i = 0; i < n; ++i) y ^= int(bits.get(i) & bits.get(n + i));
        int r = (int(ph) - 2 * y) & 3;
        return r >= 2;
    }

    static BitVec expand_bits(const BitVec& small, std::size_t n, const std::vector<std::size_t>& at) {
        std::size_t m = small.size() / 2;
        BitVec big(2 * n);
        for (std::size_t i = 0; i < m; ++i) {
            if (small.get(i)) big.set(at[i], true);
            if (small.get(m + i)) big.set(n + at[i], true);
        }
        return big;
    }

    // i^g X^x Z^z multiplication: acc *= row
    static void imul(BitVec& abits, uint8_t& aph, const BitVec& bbits, uint8_t bph) {
        std::size_t n = abits.size() / 2;
        int swaps = 0;
        for (std::size_t i = 0; i < n; ++i) swaps ^= int(abits.get(n + i) & bbits.get(i));
        aph = uint8_t((aph + bph + 2 * swaps) & 3);
        abits ^= bbits;
    }

    std::pair<BitVec, uint8_t> conj_internal(const BitVec& bits, uint8_t ph) const {
        BitVec acc(2 * n_);
        uint8_t aph = ph;
        for (std::size_t q = 0; q < n_; ++q) {
            if (bits.get(q)) imul(acc, aph, rows_[q], phase_[q]);
            if (bits.get(n_ + q)) imul(acc, aph, rows_[n_ + q], phase_[n_ + q]);
        }
        return {acc, aph};
    }

    void apply_gate_row(BitVec& r, uint8_t& ph, const GateOp& op) const {
        std::size_t q = op.q0, t = op.q1;
        bool xq = r.get(q), zq = r.get(n_ + q);
        switch (op.g) {
            case Gate::I: break;
            case Gate::H:
                r.set(q, zq);
                r.set(n_ + q, xq);
                if (xq && zq) ph = uint8_t((ph + 2) & 3);
                break;
            case Gate::S:
                if (xq) {
                    ph = uint8_t((ph + 1) & 3);
                    r.flip(n_ + q);
                }
                break;
            case Gate::Sdg:
                if (xq) {
                    ph = uint8_t((ph + 3) & 3);
                    r.flip(n_ + q);
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
                bool xc = r.get(q), zt = r.get(n_ + t);
                if (xc) r.flip(t);
                if (zt) r.flip(n_ + q);
                break;
            }
            case Gate::CZ: {
                bool xa = r.get(q), xb = r.get(t);
                if (xb) r.flip(n_ + q);
                if (xa) r.flip(n_ + t);
                if (xa && xb) ph = uint8_t((ph + 2) & 3);
                break;
            }
            default: throw std::invalid_argument("clifford: non-Clifford gate");
        }
    }
};

inline PauliWord conjugate(const PauliWord& p, const CliffordMap& c) { return c.conjugate(p); }

inline CliffordMap clifford_from_gates(std::size_t n, const std::vector<GateOp>& gates) {
    return CliffordMap::from_gates(n, gates);
}

}  // namespace ftqc
