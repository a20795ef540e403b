#pragma once

// Decoders: Hamming lookup for the Steane code, the greedy small-set-flip
// decoder (single-shot, syndrome noise tolerated), the clean-syndrome
// correcting decoder, and the stabilizer-reduced-weight oracle.

#include <array>
#include <limits>
#include <stdexcept>

#include "ftqc/codes.hpp"

namespace ftqc {

enum class CssSide : uint8_t { X, Z };  // which error type is being decoded

struct Syndrome {
    BitVec sigma_x;  // from Z-type checks (H_Z e_X)
    BitVec sigma_z;  // from X-type checks (H_X e_Z)
};

inline BitVec syndrome_of(const CssCode& code, const BitVec& err, CssSide side) {
    return side == CssSide::X ? code.pcp.h_z.mul_right(err) : code.pcp.h_x.mul_right(err);
}

struct DecodeResult {
    PauliWord recovery;
    bool flag = false;  // m = 1: decoder declares failure
    std::size_t loops_used = 0;
};

// Hamming position decoding: 1-based faulty qubit index, or nullopt for a
// trivial syndrome. i = s1*1 + s2*2 + s3*4.
inline std::optional<std::size_t> hamming_decode(const std::array<bool, 3>& s) {
    std::size_t i = std::size_t(s[0]) + 2 * std::size_t(s[1]) + 4 * std::size_t(s[2]);
    if (i == 0) return std::nullopt;
    return i;
}

// Flip candidates for the small-set-flip decoder for `side` errors: all
// nonempty subsets of each opposite-type generator's support. Candidate
// order is the tie-break order: generator index, then subset bitmask.
struct FlipCandidate {
    BitVec qubits;     // data bits to flip
    BitVec syndrome;   // syndrome change it causes
};

inline std::vector<FlipCandidate> flip_candidates(const CssCode& code, CssSide side) {
    const BitMat& checks = (side == CssSide::X) ? code.pcp.h_z : code.pcp.h_x;
    std::vector<FlipCandidate> out;
    for (std::size_t g = 0; g < checks.num_rows(); ++g) {
        auto supp = checks.row(g).support();
        if (supp.size() > 20) throw std::invalid_argument("small_set_flip: generator support too large");
        for (std::size_t mask = 1; mask < (std::size_t(1) << supp.size()); ++mask) {
            FlipCandidate c;
            c.qubits = BitVec(code.n_phys);
            for (std::size_t b = 0; b < supp.size(); ++b)
                if (mask & (std::size_t(1) << b)) c.qubits.set(supp[b], true);
            c.syndrome = checks.mul_right(c.qubits);
            out.push_back(std::move(c));
        }
    }
    return out;
}

// Greedy small-set-flip with a loop budget T. Each loop applies the
// candidate with maximal syndrome-weight reduction per flipped qubit
// (ties: lowest candidate index, i.e. lowest generator then lexicographic
// subset). Stops early when no candidate reduces the syndrome; m = 1 iff
// it stops with a nonzero syndrome and no reducing flip.
inline DecodeResult small_set_flip(const CssCode& code, const BitVec& noisy_syndrome, std::size_t loop_budget,
                                   CssSide side, const std::vector<FlipCandidate>* cands = nullptr) {
    const BitMat& checks = (side == CssSide::X) ? code.pcp.h_z : code.pcp.h_x;
    if (noisy_syndrome.size() != checks.num_rows())
        throw std::invalid_argument("small_set_flip: syndrome/side mismatch");
    std::vector<FlipCandidate> local;
    if (!cands) {
        local = flip_candidates(code, side);
        cands = &local;
    }

    BitVec syn = noisy_syndrome;
    BitVec rec(code.n_phys);
    DecodeResult res;
    std::size_t loops = 0;
    while (loops < loop_budget && syn.any()) {
        std::size_t best = cands->size();
        long best_gain = 0, best_size = 1;
        long cur = long(syn.popcount());
        for (std::size_t i = 0; i < cands->size(); ++i) {
            long after = long((syn ^ (*cands)[i].syndrome).popcount());
            long gain = cur - after;
            if (gain <= 0) continue;
            long size = long((*cands)[i].qubits.popcount());
            // compare gain/size as exact rationals
            if (gain * best_size > best_gain * size) {
                best_gain = gain;
                best_size = size;
                best = i;
            }
        }
        if (best == cands->size()) break;  // stuck
        rec ^= (*cands)[best].qubits;
        syn ^= (*cands)[best].syndrome;
        ++loops;
    }
    res.loops_used = loops;
    res.recovery = PauliWord(code.n_phys);
    if (side == CssSide::X)
        res.recovery.x = rec;
    else
        res.recovery.z = rec;
    if (syn.any()) {
        // m = 1 iff stuck: nonzero syndrome and no candidate reduces it
        bool reducible = false;
        long cur = long(syn.popcount());
        for (const auto& c : *cands)
            if (long((syn ^ c.syndrome).popcount()) < cur) {
                reducible = true;
                break;
            }
        res.flag = !reducible;
    }
    return res;
}

// Clean-syndrome correcting decoder: small-set-flip with T = ceil(4 log2 N)
// loops. The decoder-side failure flag is a nonzero residual syndrome; the
// full class-correctness contract (e + r in C_P^perp) is checked by the
// test oracles.
inline DecodeResult correcting_decode(const CssCode& code, const BitVec& clean_syndrome, CssSide side,
                                      const std::vector<FlipCandidate>* cands = nullptr) {
    std::size_t t = std::size_t(std::ceil(4.0 * std::log2(double(std::max<std::size_t>(2, code.n_phys)))));
    auto res = small_set_flip(code, clean_syndrome, t, side, cands);
    const BitVec& rec = (side == CssSide::X) ? res.recovery.x : res.recovery.z;
    BitVec resid = clean_syndrome ^ syndrome_of(code, rec, side);
    res.flag = resid.any();
    return res;
}

// Stabilizer-reduced weight |e|_R: minimum weight over the coset
// e + rowspace(stabilizers of the same type). Exact by Gray-code coset
// enumeration when the stabilizer rank is small; otherwise a greedy
// descent upper bound, flagged.
struct ReducedWeight {
    std::size_t value;
    bool exact;
};

inline ReducedWeight reduced_weight(const BitVec& err, const CssCode& code, CssSide side,
                                    std::size_t exhaustive_rank_limit = 22) {
    const BitMat& stab = (side == CssSide::X) ? code.pcp.h_x : code.pcp.h_z;
    BitMat red = stab;
    auto pivots = red.row_reduce();
    std::size_t rank = pivots.size();
    if (rank <= exhaustive_rank_limit) {
        // Gray-code walk over all 2^rank coset members
        BitVec cur = err;
        std::size_t best = cur.popcount();
        std::size_t count = std::size_t(1) << rank;
        for (std::size_t g = 1; g < count; ++g) {
            std::size_t bit = std::size_t(__builtin_ctzll(g));
            cur ^= red.row(bit);
            best = std::min(best, cur.popcount());
        }
        return {best, true};
    }
    // greedy descent: repeatedly apply the generator that lowers the weight
    BitVec cur = err;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < rank; ++i) {
            BitVec cand = cur ^ red.row(i);
            if (cand.popcount() < cur.popcount()) {
                cur = cand;
                improved = true;
            }
        }
    }
    return {cur.popcount(), false};
}

inline ReducedWeight reduced_weight(const PauliWord& e, const CssCode& code) {
    auto wx = reduced_weight(e.x, code, CssSide::X);
    auto wz = reduced_weight(e.z, code, CssSide::Z);
    // for a mixed word report the sum of per-side reduced weights
    return {wx.value + wz.value, wx.exact && wz.exact};
}

// Is the residual e + r in the stabilizer class of the identity?
inline bool corrects_to_identity_class(const CssCode& code, const BitVec& err, const BitVec& rec, CssSide side) {
    const BitMat& stab = (side == CssSide::X) ? code.pcp.h_x : code.pcp.h_z;
    return stab.in_row_space(err ^ rec);
}

}  // namespace ftqc
