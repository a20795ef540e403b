#pragma once

// CSS code construction and validation: the Steane code, level-L
// concatenated Steane parameters, hypergraph products as the concrete
// LDPC family, standard-form logical operators, brute-force distance
// probing, and code selection by target size.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftqc/pauli.hpp"
#include "ftqc/rng.hpp"

namespace ftqc {

struct ParityCheckPair {
    BitMat h_x;  // X-type generators (rows are X supports)
    BitMat h_z;  // Z-type generators

    std::size_t block_len() const { return h_x.num_cols(); }

    bool css_valid() const {
        if (h_x.num_cols() != h_z.num_cols()) return false;
        return h_z.mul(h_x.transpose()).is_zero();
    }
};

struct CssCode {
    ParityCheckPair pcp;
    std::size_t n_phys = 0;  // N
    std::size_t k_logical = 0;  // K
    std::size_t distance = 0;   // probed distance; 0 = unknown
    bool distance_exact = false;
    std::vector<PauliWord> logical_x;  // K words, X-type
    std::vector<PauliWord> logical_z;  // K words, Z-type

    std::size_t num_x_generators() const { return pcp.h_x.num_rows(); }
    std::size_t num_z_generators() const { return pcp.h_z.num_rows(); }

    PauliWord x_generator(std::size_t i) const {
        PauliWord p(n_phys);
        p.x = pcp.h_x.row(i);
        return p;
    }
    PauliWord z_generator(std::size_t i) const {
        PauliWord p(n_phys);
        p.z = pcp.h_z.row(i);
        return p;
    }

    // row/column sparsity over both check matrices
    std::pair<std::size_t, std::size_t> sparsity() const {
        std::size_t r = 0, c = 0;
        for (std::size_t i = 0; i < pcp.h_x.num_rows(); ++i) r = std::max(r, pcp.h_x.row(i).popcount());
        for (std::size_t i = 0; i < pcp.h_z.num_rows(); ++i) r = std::max(r, pcp.h_z.row(i).popcount());
        for (std::size_t j = 0; j < n_phys; ++j) {
            std::size_t cx = 0, cz = 0;
            for (std::size_t i = 0; i < pcp.h_x.num_rows(); ++i) cx += pcp.h_x.get(i, j);
            for (std::size_t i = 0; i < pcp.h_z.num_rows(); ++i) cz += pcp.h_z.get(i, j);
            c = std::max({c, cx, cz});
        }
        return {r, c};
    }

    bool check_invariants(std::string* why = nullptr) const {
        auto fail = [&](const std::string& m) {
            if (why) *why = m;
            return false;
        };
        if (!pcp.css_valid()) return fail("H_Z H_X^T != 0");
        if (logical_x.size() != k_logical || logical_z.size() != k_logical) return fail("logical count");
        std::size_t kx = n_phys - pcp.h_x.rank();
        std::size_t kz = n_phys - pcp.h_z.rank();
        if (kx + kz < n_phys || kx + kz - n_phys != k_logical) return fail("K != K_X + K_Z - N");
        for (std::size_t i = 0; i < k_logical; ++i) {
            for (std::size_t g = 0; g < num_x_generators(); ++g) {
                if (symplectic_inner(logical_x[i], x_generator(g)) || symplectic_inner(logical_z[i], x_generator(g)))
                    return fail("logical anticommutes with X generator");
            }
            for (std::size_t g = 0; g < num_z_generators(); ++g) {
                if (symplectic_inner(logical_x[i], z_generator(g)) || symplectic_inner(logical_z[i], z_generator(g)))
                    return fail("logical anticommutes with Z generator");
            }
            for (std::size_t j = 0; j < k_logical; ++j) {
                int want = (i == j) ? 1 : 0;
                if (symplectic_inner(logical_x[i], logical_z[j]) != want) return fail("logical pairing");
            }
        }
        return true;
    }
};

// Standard-form logical operators by Gaussian elimination with
// lexicographic pivoting: X logicals from ker(H_Z) mod rowspace(H_X),
// Z logicals from ker(H_X) mod rowspace(H_Z), paired to L_X L_Z^T = I.
inline std::pair<std::vector<PauliWord>, std::vector<PauliWord>> logicals_standard_form(const ParityCheckPair& pcp) {
    if (!pcp.css_valid()) throw std::invalid_argument("logicals: CSS invariant violated");
    std::size_t n = pcp.block_len();

    auto quotient_basis = [n](const BitMat& ker_of, const BitMat& mod_rows) {
        auto kb = ker_of.kernel_basis();
        BitMat acc = mod_rows;
        std::vector<BitVec> out;
        for (const auto& v : kb) {
            BitVec r = acc.reduce_mod_rows(v);
            if (r.any()) {
                out.push_back(v);
                acc.append_row(v);
            }
        }
        return out;
    };

    auto xs = quotient_basis(pcp.h_z, pcp.h_x);   // X-type: in ker H_Z
    auto zs = quotient_basis(pcp.h_x, pcp.h_z);   // Z-type: in ker H_X
    if (xs.size() != zs.size()) throw std::runtime_error("logicals: rank inconsistency");
    std::size_t k = xs.size();

    // pairing matrix M[i][j] = <xs_i, zs_j>
    BitMat m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m.set(i, j, xs[i].dot(zs[j]));

    // invert M over F2
    BitMat aug(k, 2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug.set(i, j, m.get(i, j));
        aug.set(i, k + i, true);
    }
    std::size_t r = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t sel = r;
        while (sel < k && !aug.get(sel, c)) ++sel;
        if (sel == k) throw std::runtime_error("logicals: degenerate pairing");
        std::swap(aug.row(r), aug.row(sel));
        for (std::size_t i = 0; i < k; ++i)
            if (i != r && aug.get(i, c)) aug.row(i) ^= aug.row(r);
        ++r;
    }
    BitMat minv(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) minv.set(i, j, aug.get(i, k + j));

    // L_Z' = (M^{-1})^T * L_Z  so that L_X L_Z'^T = I
    std::vector<PauliWord> lx, lz;
    for (std::size_t i = 0; i < k; ++i) {
        PauliWord px(n);
        px.x = xs[i];
        lx.push_back(px);
        BitVec zrow(n);
        for (std::size_t j = 0; j < k; ++j)
            if (minv.get(j, i)) zrow ^= zs[j];
        PauliWord pz(n);
        pz.z = zrow;
        lz.push_back(pz);
    }
    return {lx, lz};
}

inline CssCode make_css_code(ParityCheckPair pcp) {
    CssCode code;
    code.pcp = std::move(pcp);
    code.n_phys = code.pcp.block_len();
    auto [lx, lz] = logicals_standard_form(code.pcp);
    code.k_logical = lx.size();
    code.logical_x = std::move(lx);
    code.logical_z = std::move(lz);
    return code;
}

namespace detail {
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t w = idx.size();
    std::size_t i = w;
    while (i > 0) {
        --i;
        if (idx[i] != i + n - w) {
            ++idx[i];
            for (std::size_t j = i + 1; j < w; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}
}  // namespace detail

// Exact distance if <= w_max by exhaustive search over X-type and Z-type
// words (CSS distance is the min over the two sides), else a lower bound.
// Returns {value, exact?}; for K = 0 throws (no logical qubits).
inline std::pair<std::size_t, bool> brute_force_distance(const CssCode& code, std::size_t w_max) {
    if (code.k_logical == 0) throw std::invalid_argument("distance: no logical qubits");
    std::size_t n = code.n_phys;

    // side = X: search x-vectors in ker(H_Z) \ rowspace(H_X)
    auto side_search = [&](const BitMat& ker_of, const BitMat& stab_rows) -> std::size_t {
        BitMat red = stab_rows;
        auto pivots = red.row_reduce();
        auto is_stabilizer = [&](const BitVec& v) {
            BitVec w = v;
            for (std::size_t pi = 0; pi < pivots.size(); ++pi)
                if (w.get(pivots[pi])) w ^= red.row(pi);
            return w.none();
        };
        for (std::size_t w = 1; w <= std::min(w_max, n); ++w) {
            std::vector<std::size_t> idx(w);
            for (std::size_t i = 0; i < w; ++i) idx[i] = i;
            do {
                BitVec v(n);
                for (auto i : idx) v.set(i, true);
                if (ker_of.mul_right(v).none() && !is_stabilizer(v)) return w;
            } while (detail::next_combination(idx, n));
        }
        return 0;
    };

    std::size_t dx = side_search(code.pcp.h_z, code.pcp.h_x);
    std::size_t dz = side_search(code.pcp.h_x, code.pcp.h_z);
    std::size_t d = 0;
    if (dx && dz)
        d = std::min(dx, dz);
    else
        d = std::max(dx, dz);
    if (d != 0) return {d, true};
    return {w_max + 1, false};  // all weights <= w_max are non-logical
}

inline CssCode steane() {
    ParityCheckPair pcp;
    pcp.h_x = BitMat::from_rows({"1010101", "0110011", "0001111"});
    pcp.h_z = pcp.h_x;
    CssCode code = make_css_code(std::move(pcp));
    auto [d, exact] = brute_force_distance(code, 3);
    code.distance = d;
    code.distance_exact = exact;
    return code;
}

// Level-L concatenated Steane parameters with the per-level block tree.
struct ConcatenatedSteane {
    std::size_t level = 1;
    std::size_t n_phys = 7;    // 7^L
    std::size_t k_logical = 1;
    std::size_t distance = 3;  // 3^L
    CssCode base;              // the level-1 block

    // physical qubit indices of child block b (0..6) of a level-l block
    // rooted at `root`, where blocks are laid out contiguously
    static std::pair<std::size_t, std::size_t> child_span(std::size_t root, std::size_t level, std::size_t b) {
        std::size_t child_size = 1;
        for (std::size_t i = 1; i < level; ++i) child_size *= 7;
        return {root + b * child_size, child_size};
    }
};

inline ConcatenatedSteane concatenated_steane(std::size_t level) {
    if (level == 0) throw std::invalid_argument("concatenated_steane: level must be >= 1");
    ConcatenatedSteane c;
    c.level = level;
    c.base = steane();
    c.n_phys = 1;
    c.distance = 1;
    for (std::size_t l = 0; l < level; ++l) {
        c.n_phys *= 7;
        c.distance *= 3;
    }
    return c;
}

// Hypergraph product of two classical parity checks.
// H_X = [H_a (x) I_nb | I_ma (x) H_b^T],  H_Z = [I_na (x) H_b | H_a^T (x) I_mb].
inline CssCode hypergraph_product(const BitMat& h_a, const BitMat& h_b) {
    if (h_a.num_rows() == 0 || h_a.num_cols() == 0 || h_b.num_rows() == 0 || h_b.num_cols() == 0)
        throw std::invalid_argument("hgp: empty matrix");
    std::size_t ma = h_a.num_rows(), na = h_a.num_cols();
    std::size_t mb = h_b.num_rows(), nb = h_b.num_cols();
    std::size_t n_left = na * nb, n_right = ma * mb;
    std::size_t n = n_left + n_right;

    auto left_idx = [nb](std::size_t i, std::size_t j) { return i * nb + j; };          // (na, nb)
    auto right_idx = [mb, n_left](std::size_t i, std::size_t j) { return n_left + i * mb + j; };  // (ma, mb)

    ParityCheckPair pcp;
    pcp.h_x = BitMat(ma * nb, n);
    for (std::size_t r = 0; r < ma; ++r)
        for (std::size_t c = 0; c < nb; ++c) {
            std::size_t row = r * nb + c;
            for (std::size_t j = 0; j < na; ++j)
                if (h_a.get(r, j)) pcp.h_x.set(row, left_idx(j, c), true);
            for (std::size_t j = 0; j < mb; ++j)
                if (h_b.get(j, c)) pcp.h_x.set(row, right_idx(r, j), true);
        }
    pcp.h_z = BitMat(na * mb, n);
    for (std::size_t r = 0; r < na; ++r)
        for (std::size_t c = 0; c < mb; ++c) {
            std::size_t row = r * mb + c;
            for (std::size_t j = 0; j < nb; ++j)
                if (h_b.get(c, j)) pcp.h_z.set(row, left_idx(r, j), true);
            for (std::size_t j = 0; j < ma; ++j)
                if (h_a.get(j, r)) pcp.h_z.set(row, right_idx(j, c), true);
        }

    if (!pcp.css_valid()) throw std::logic_error("hgp: construction violated CSS");
    if (pcp.h_x.rank() + pcp.h_z.rank() == n) {
        // K = 0: skip logicals
        CssCode code;
        code.pcp = std::move(pcp);
        code.n_phys = n;
        code.k_logical = 0;
        return code;
    }
    return make_css_code(std::move(pcp));
}

// Seeded random (row_w, col_w)-biregular parity check of shape m x n with
// n*col_w == m*row_w; resamples until no repeated edge collapses a column.
inline BitMat biregular_check(std::size_t m, std::size_t n, std::size_t row_w, std::size_t col_w, uint64_t seed) {
    if (m * row_w != n * col_w) throw std::invalid_argument("biregular: m*row_w != n*col_w");
    auto rng = make_rng(seed, 0xb1);
    std::vector<std::size_t> stubs;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < col_w; ++k) stubs.push_back(j);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    // stub position s belongs to row s / row_w; repair double edges (which
    // would cancel mod 2) by swapping stubs between rows
    auto row_of = [row_w](std::size_t s) { return s / row_w; };
    auto has_dup = [&](std::size_t s) {
        std::size_t r = row_of(s);
        for (std::size_t k = r * row_w; k < (r + 1) * row_w; ++k)
            if (k != s && stubs[k] == stubs[s]) return true;
        return false;
    };
    for (std::size_t iter = 0; iter < 100000; ++iter) {
        std::size_t bad = stubs.size();
        for (std::size_t s = 0; s < stubs.size(); ++s)
            if (has_dup(s)) {
                bad = s;
                break;
            }
        if (bad == stubs.size()) {
            BitMat h(m, n);
            for (std::size_t s = 0; s < stubs.size(); ++s) h.set(row_of(s), stubs[s], true);
            return h;
        }
        std::size_t other = rng() % stubs.size();
        std::swap(stubs[bad], stubs[other]);
    }
    throw std::runtime_error("biregular: sampling failed");
}

struct LdpcFamily {
    struct Member {
        std::size_t n_phys;
        std::function<CssCode()> build;
    };
    std::vector<Member> members;   // strictly increasing n_phys
    std::size_t row_sparsity = 0;  // r
    std::size_t col_sparsity = 0;  // c
    double growth_beta = 1.0;      // beta bound for N_i - N_{i-1} <= N_{i-1}^beta

    bool growth_ok() const {
        for (std::size_t i = 1; i < members.size(); ++i) {
            double gap = double(members[i].n_phys) - double(members[i - 1].n_phys);
            if (gap <= 0) return false;
            if (gap > std::pow(double(members[i - 1].n_phys), growth_beta)) return false;
        }
        return true;
    }
};

// The repo's concrete family: the [[13,1,3]] toy member (HGP of the length-3
// repetition check) plus hypergraph products of seeded random (3,4)-biregular
// checks of growing size. Asymptotic expansion is not certified at these
// sizes; distances are probed, not assumed.
inline LdpcFamily default_ldpc_family(uint64_t seed = 20240901, std::size_t count = 4) {
    LdpcFamily fam;
    fam.row_sparsity = 6;  // HGP of (3,4)-biregular: row weight <= 4 + 3 (see below)
    fam.col_sparsity = 4;
    fam.growth_beta = 1.0;
    fam.members.push_back({13, []() {
                               auto rep = BitMat::from_rows({"110", "011"});
                               auto code = hypergraph_product(rep, rep);
                               auto [d, exact] = brute_force_distance(code, 3);
                               code.distance = d;
                               code.distance_exact = exact;
                               return code;
                           }});
    // (3,4)-biregular m x n with 4m = 3n: (m, n) = (6, 8), (9, 12), (12, 16), ...
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t m = 6 + 3 * i, n = 8 + 4 * i;
        std::size_t nn = n * n + m * m;
        uint64_t s = seed + i;
        fam.members.push_back({nn, [m, n, s, nn]() {
                                   auto h = biregular_check(m, n, 4, 3, s);
                                   auto code = hypergraph_product(h, h);
                                   std::size_t w_max = nn <= 150 ? 3 : 2;  // probe cost grows as C(N, w)
                                   auto [d, exact] = brute_force_distance(code, w_max);
                                   code.distance = d;
                                   code.distance_exact = exact;
                                   return code;
                               }});
    }
    return fam;
}

struct CodeSelection {
    CssCode code;
    std::size_t index;
    double n_min;
    // The beta-gap bound N_i - N_{i-1} <= N_{i-1}^beta at the selected step;
    // when it holds, the chain gives N <= 2 c_N N_min, which is also asserted.
    bool growth_bound_ok;
};

// N_min = c_N log^alpha(circuit_size / eps); picks the smallest member with
// N_i >= N_min.
inline CodeSelection select_code(const LdpcFamily& family, double circuit_size, double eps, double c_n, double alpha) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("select_code: eps not in (0,1)");
    if (family.members.empty()) throw std::invalid_argument("select_code: empty family");
    double n_min = c_n * std::pow(std::log(circuit_size / eps), alpha);
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        if (double(family.members[i].n_phys) >= n_min) {
            CodeSelection sel;
            sel.code = family.members[i].build();
            sel.index = i;
            sel.n_min = n_min;
            sel.growth_bound_ok = true;
            if (i > 0) {
                double prev = double(family.members[i - 1].n_phys);
                double gap = double(family.members[i].n_phys) - prev;
                sel.growth_bound_ok = gap <= std::pow(prev, family.growth_beta);
            }
            if (sel.growth_bound_ok && double(family.members[i].n_phys) > 2.0 * std::max(1.0, c_n) * std::max(n_min, 1.0))
                throw std::logic_error("select_code: growth chain violated despite beta bound");
            return sel;
        }
    }
    throw std::runtime_error("select_code: family exhausted (no member large enough)");
}

// --- serialization -------------------------------------------------------
// Line oriented: header `CSS N K`, then HX/HZ/LX/LZ rows as 0/1 strings,
// qubit 0 leftmost.

inline void write_code(std::ostream& os, const CssCode& code) {
    os << "CSS " << code.n_phys << ' ' << code.k_logical << '\n';
    for (std::size_t i = 0; i < code.pcp.h_x.num_rows(); ++i) os << "HX " << code.pcp.h_x.row(i).to_string() << '\n';
    for (std::size_t i = 0; i < code.pcp.h_z.num_rows(); ++i) os << "HZ " << code.pcp.h_z.row(i).to_string() << '\n';
    for (const auto& l : code.logical_x) os << "LX " << l.x.to_string() << '\n';
    for (const auto& l : code.logical_z) os << "LZ " << l.z.to_string() << '\n';
}

inline CssCode read_code(std::istream& is) {
    std::string line, tag;
    CssCode code;
    std::size_t n = 0, k = 0;
    bool have_header = false;
    std::vector<std::string> hx, hz, lx, lz;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        ls >> tag;
        if (tag == "CSS") {
            ls >> n >> k;
            have_header = true;
        } else if (tag == "HX") {
            std::string r;
            ls >> r;
            hx.push_back(r);
        } else if (tag == "HZ") {
            std::string r;
            ls >> r;
            hz.push_back(r);
        } else if (tag == "LX") {
            std::string r;
            ls >> r;
            lx.push_back(r);
        } else if (tag == "LZ") {
            std::string r;
            ls >> r;
            lz.push_back(r);
        } else {
            throw std::runtime_error("read_code: unknown tag '" + tag + "'");
        }
    }
    if (!have_header) throw std::runtime_error("read_code: missing CSS header");
    code.n_phys = n;
    code.k_logical = k;
    code.pcp.h_x = BitMat::from_rows(hx);
    code.pcp.h_z = BitMat::from_rows(hz);
    for (const auto& s : lx) {
        PauliWord p(n);
        p.x = BitVec::from_string(s);
        code.logical_x.push_back(p);
    }
    for (const auto& s : lz) {
        PauliWord p(n);
        p.z = BitVec::from_string(s);
        code.logical_z.push_back(p);
    }
    std::string why;
    if (!code.check_invariants(&why)) throw std::runtime_error("read_code: invalid code: " + why);
    return code;
}

}  // namespace ftqc
