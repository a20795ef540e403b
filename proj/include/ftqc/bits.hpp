#pragma once

// Packed GF(2) vectors and matrices: the workhorse for symplectic rows,
// parity checks and standard-form reductions.

#include <cassert>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ftqc {

class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_string(const std::string& s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            assert(s[i] == '0' || s[i] == '1');
            if (s[i] == '1') v.set(i, true);
        }
        return v;
    }

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        assert(i < n_);
        return (w_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool b) {
        assert(i < n_);
        uint64_t m = uint64_t(1) << (i & 63);
        if (b)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) {
        assert(i < n_);
        w_[i >> 6] ^= uint64_t(1) << (i & 63);
    }

    BitVec& operator^=(const BitVec& o) {
        assert(n_ == o.n_);
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    BitVec operator^(const BitVec& o) const {
        BitVec r = *this;
        r ^= o;
        return r;
    }
    BitVec operator&(const BitVec& o) const {
        assert(n_ == o.n_);
        BitVec r = *this;
        for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] &= o.w_[k];
        return r;
    }
    BitVec operator|(const BitVec& o) const {
        assert(n_ == o.n_);
        BitVec r = *this;
        for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] |= o.w_[k];
        return r;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t w : w_) c += std::size_t(__builtin_popcountll(w));
        return c;
    }
    bool any() const {
        for (uint64_t w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    // parity of <this, other> over F2
    bool dot(const BitVec& o) const {
        assert(n_ == o.n_);
        uint64_t acc = 0;
        for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
        return __builtin_popcountll(acc) & 1;
    }

    std::optional<std::size_t> first_set() const {
        for (std::size_t k = 0; k < w_.size(); ++k)
            if (w_[k]) return (k << 6) + std::size_t(__builtin_ctzll(w_[k]));
        return std::nullopt;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t k = 0; k < w_.size(); ++k) {
            uint64_t w = w_[k];
            while (w) {
                s.push_back((k << 6) + std::size_t(__builtin_ctzll(w)));
                w &= w - 1;
            }
        }
        return s;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    // concatenation [this | other]
    BitVec concat(const BitVec& o) const {
        BitVec r(n_ + o.n_);
        for (std::size_t i = 0; i < n_; ++i) r.set(i, get(i));
        for (std::size_t i = 0; i < o.n_; ++i) r.set(n_ + i, o.get(i));
        return r;
    }
    BitVec slice(std::size_t begin, std::size_t len) const {
        assert(begin + len <= n_);
        BitVec r(len);
        for (std::size_t i = 0; i < len; ++i) r.set(i, get(begin + i));
        return r;
    }

    bool operator<(const BitVec& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        for (std::size_t k = w_.size(); k-- > 0;)
            if (w_[k] != o.w_[k]) return w_[k] < o.w_[k];
        return false;
    }

  private:
    std::size_t n_ = 0;
    std::vector<uint64_t> w_;
};

class BitMat {
  public:
    BitMat() = default;
    BitMat(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

    static BitMat from_rows(const std::vector<std::string>& rs) {
        BitMat m(rs.size(), rs.empty() ? 0 : rs[0].size());
        for (std::size_t i = 0; i < rs.size(); ++i) m.rows_[i] = BitVec::from_string(rs[i]);
        return m;
    }
    static BitMat identity(std::size_t n) {
        BitMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.rows_[i].set(i, true);
        return m;
    }

    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_cols() const { return cols_; }

    BitVec& row(std::size_t i) { return rows_[i]; }
    const BitVec& row(std::size_t i) const { return rows_[i]; }
    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool b) { rows_[i].set(j, b); }

    void append_row(const BitVec& r) {
        assert(cols_ == 0 || r.size() == cols_);
        if (cols_ == 0) cols_ = r.size();
        rows_.push_back(r);
    }

    // y = x * M (row vector times matrix)
    BitVec mul_left(const BitVec& x) const {
        assert(x.size() == rows_.size());
        BitVec y(cols_);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (x.get(i)) y ^= rows_[i];
        return y;
    }
    // y = M * x^T, returned as a vector of length num_rows
    BitVec mul_right(const BitVec& x) const {
        assert(x.size() == cols_);
        BitVec y(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) y.set(i, rows_[i].dot(x));
        return y;
    }

    BitMat transpose() const {
        BitMat t(cols_, rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (rows_[i].get(j)) t.set(j, i, true);
        return t;
    }

    BitMat mul(const BitMat& o) const {
        assert(cols_ == o.num_rows());
        BitMat r(rows_.size(), o.num_cols());
        for (std::size_t i = 0; i < rows_.size(); ++i) r.rows_[i] = o.mul_left(rows_[i]);
        return r;
    }

    bool operator==(const BitMat& o) const { return cols_ == o.cols_ && rows_ == o.rows_; }

    bool is_zero() const {
        for (const auto& r : rows_)
            if (r.any()) return false;
        return true;
    }

    // In-place row echelon with lexicographic (left-to-right) pivoting.
    // Returns pivot columns. Deterministic.
    std::vector<std::size_t> row_reduce() {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_.size(); ++c) {
            std::size_t sel = r;
            while (sel < rows_.size() && !rows_[sel].get(c)) ++sel;
            if (sel == rows_.size()) continue;
            std::swap(rows_[r], rows_[sel]);
            for (std::size_t i = 0; i < rows_.size(); ++i)
                if (i != r && rows_[i].get(c)) rows_[i] ^= rows_[r];
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank() const {
        BitMat cp = *this;
        return cp.row_reduce().size();
    }

    // Basis of the right kernel {x : M x^T = 0}, deterministic.
    std::vector<BitVec> kernel_basis() const {
        BitMat red = *this;
        auto pivots = red.row_reduce();
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<BitVec> basis;
        for (std::size_t free = 0; free < cols_; ++free) {
            if (is_pivot[free]) continue;
            BitVec v(cols_);
            v.set(free, true);
            for (std::size_t pi = 0; pi < pivots.size(); ++pi)
                if (red.rows_[pi].get(free)) v.set(pivots[pi], true);
            basis.push_back(v);
        }
        return basis;
    }

    // Solve x * M = b for a row vector x; nullopt if inconsistent.
    std::optional<BitVec> solve_left(const BitVec& b) const {
        // transpose to solve M^T x^T = b^T by elimination on augmented system
        BitMat t = transpose();
        std::size_t m = t.num_rows(), n = t.num_cols();
        assert(b.size() == m);
        BitMat aug(m, n + 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) aug.set(i, j, t.get(i, j));
            aug.set(i, n, b.get(i));
        }
        std::size_t r = 0;
        std::vector<std::size_t> pivots;
        for (std::size_t c = 0; c < n && r < m; ++c) {
            std::size_t sel = r;
            while (sel < m && !aug.rows_[sel].get(c)) ++sel;
            if (sel == m) continue;
            std::swap(aug.rows_[r], aug.rows_[sel]);
            for (std::size_t i = 0; i < m; ++i)
                if (i != r && aug.rows_[i].get(c)) aug.rows_[i] ^= aug.rows_[r];
            pivots.push_back(c);
            ++r;
        }
        for (std::size_t i = r; i < m; ++i)
            if (aug.get(i, n)) return std::nullopt;
        BitVec x(n);
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            if (aug.get(pi, n)) x.set(pivots[pi], true);
        return x;
    }

    // Is v in the row space?
    bool in_row_space(const BitVec& v) const {
        BitMat red = *this;
        auto pivots = red.row_reduce();
        BitVec w = v;
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            if (w.get(pivots[pi])) w ^= red.rows_[pi];
        return w.none();
    }

    // Reduce v modulo the row space (with this already in echelon form or not).
    BitVec reduce_mod_rows(const BitVec& v) const {
        BitMat red = *this;
        auto pivots = red.row_reduce();
        BitVec w = v;
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            if (w.get(pivots[pi])) w ^= red.rows_[pi];
        return w;
    }

  private:
    std::size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

}  // namespace ftqc
