#pragma once

// Projective n-qubit Paulis in the binary symplectic representation.
//
// Convention: a word with bit vectors (x, z) and sign s denotes the operator
//   (-1)^s * tensor_j Z^{z_j} X^{x_j},
// i.e. per-qubit factors from {I, X, Z, ZX} with beta = 1. The real group
// {+-1} x {Z^z X^x} is closed under multiplication, so pauli_mul is exact
// including the sign (rule: s = s_a ^ s_b ^ parity(x_a & z_b)). The textual
// literal 'Y' maps to the ZX representative (phi(Y) = [1,1]); the i in
// Y = iXZ is dropped, which is the projective beta = 1 choice.

#include <stdexcept>
#include <string>

#include "ftqc/bits.hpp"

namespace ftqc {

struct PauliWord {
    std::size_t n = 0;
    BitVec x, z;
    bool sign = false;  // true means an overall -1

    PauliWord() = default;
    explicit PauliWord(std::size_t n_) : n(n_), x(n_), z(n_) {}
    PauliWord(BitVec x_, BitVec z_, bool sign_ = false)
        : n(x_.size()), x(std::move(x_)), z(std::move(z_)), sign(sign_) {
        if (x.size() != z.size()) throw std::invalid_argument("pauli: x/z length mismatch");
    }

    static PauliWord identity(std::size_t n) { return PauliWord(n); }

    bool is_identity() const { return !sign && x.none() && z.none(); }

    // symplectic vector [x, z] in F2^{2n}
    BitVec symplectic() const { return x.concat(z); }

    static PauliWord from_symplectic(const BitVec& v, bool sign = false) {
        if (v.size() % 2 != 0) throw std::invalid_argument("pauli: odd symplectic length");
        std::size_t n = v.size() / 2;
        return PauliWord(v.slice(0, n), v.slice(n, n), sign);
    }

    bool operator==(const PauliWord& o) const { return n == o.n && sign == o.sign && x == o.x && z == o.z; }
    bool equals_projective(const PauliWord& o) const { return n == o.n && x == o.x && z == o.z; }

    // Textual literal over {I,X,Y,Z} with optional leading '-'.
    static PauliWord parse(const std::string& s) {
        std::size_t i = 0;
        bool sgn = false;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
            sgn = (s[i] == '-');
            ++i;
        }
        PauliWord p(s.size() - i);
        p.sign = sgn;
        for (std::size_t q = 0; i < s.size(); ++i, ++q) {
            switch (s[i]) {
                case 'I': break;
                case 'X': p.x.set(q, true); break;
                case 'Z': p.z.set(q, true); break;
                case 'Y':
                    p.x.set(q, true);
                    p.z.set(q, true);
                    break;
                default: throw std::invalid_argument("pauli: bad literal char");
            }
        }
        return p;
    }

    std::string to_string() const {
        std::string s = sign ? "-" : "";
        for (std::size_t q = 0; q < n; ++q) {
            bool xb = x.get(q), zb = z.get(q);
            s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
        }
        return s;
    }
};

// embed into a wider word at qubit offset
inline PauliWord embed_word(const PauliWord& p, std::size_t width, std::size_t offset = 0) {
    if (offset + p.n > width) throw std::invalid_argument("embed_word: does not fit");
    PauliWord big(width);
    big.sign = p.sign;
    for (std::size_t q = 0; q < p.n; ++q) {
        if (p.x.get(q)) big.x.set(offset + q, true);
        if (p.z.get(q)) big.z.set(offset + q, true);
    }
    return big;
}

inline PauliWord pauli_mul(const PauliWord& a, const PauliWord& b) {
    if (a.n != b.n) throw std::invalid_argument("pauli_mul: length mismatch");
    PauliWord r(a.n);
    r.x = a.x ^ b.x;
    r.z = a.z ^ b.z;
    // (Z^z1 X^x1)(Z^z2 X^x2) = (-1)^{x1.z2} Z^{z1+z2} X^{x1+x2} per qubit
    r.sign = a.sign ^ b.sign ^ a.x.dot(b.z);
    return r;
}

// 1 iff the operators anticommute (x z'^T + x' z^T over F2).
inline int symplectic_inner(const PauliWord& a, const PauliWord& b) {
    if (a.n != b.n) throw std::invalid_argument("symplectic_inner: length mismatch");
    return int(a.x.dot(b.z) ^ b.x.dot(a.z));
}

inline std::size_t weight(const PauliWord& p) { return (p.x | p.z).popcount(); }

}  // namespace ftqc
