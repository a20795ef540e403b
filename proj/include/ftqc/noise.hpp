#pragma once

// Local stochastic Pauli error model sampling. The canonical simulator is
// the independent-Bernoulli extremal member of the model family (which
// attains the defining product inequality with equality); adversarial or
// correlated assignments enter through the injection API.

#include <map>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftqc/pauli.hpp"
#include "ftqc/rng.hpp"

namespace ftqc {

struct NoiseSpec {
    double p_loc = 0.0;
    uint64_t seed = 0;
    std::map<std::size_t, double> overrides;  // per-location p_i
    bool assume_bounded = true;               // assert p_i <= p_loc

    double p_at(std::size_t loc) const {
        auto it = overrides.find(loc);
        double p = (it == overrides.end()) ? p_loc : it->second;
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise: p outside [0,1]");
        if (assume_bounded && it != overrides.end() && it->second > p_loc)
            throw std::invalid_argument("noise: override exceeds p_loc");
        return p;
    }

    bool uniform() const { return overrides.empty(); }
};

// key=value text: p_loc=1e-3, seed=42, override.<loc>=p
inline NoiseSpec parse_noise_config(std::istream& is) {
    NoiseSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("noise config line " + std::to_string(lineno) + ": missing '='");
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "p_loc")
            spec.p_loc = std::stod(val);
        else if (key == "seed")
            spec.seed = std::stoull(val);
        else if (key.rfind("override.", 0) == 0)
            spec.overrides[std::stoull(key.substr(9))] = std::stod(val);
        else
            throw std::runtime_error("noise config line " + std::to_string(lineno) + ": unknown key " + key);
    }
    if (spec.p_loc < 0.0 || spec.p_loc > 1.0) throw std::runtime_error("noise config: p_loc outside [0,1]");
    return spec;
}

struct FaultAssignment {
    // faulty location ids, increasing
    std::vector<std::size_t> faults;
    // per-fault data: for gate/prep/wait faults a Pauli on the location's
    // support (local word of the support size); for measurement faults a
    // single flip bit encoded as an X on a 1-qubit word
    std::vector<PauliWord> errors;
};

// Sample the fault set over `num_locations` locations, each included
// independently with its p_i. Deterministic under (spec.seed, trial).
inline std::vector<std::size_t> sample_fault_set(std::size_t num_locations, const NoiseSpec& spec, uint64_t trial) {
    auto rng = make_rng(spec.seed, trial);
    std::vector<std::size_t> faults;
    if (spec.uniform()) {
        double p = spec.p_at(0);
        if (p <= 0.0) return faults;
        std::size_t loc = 0;
        while (true) {
            uint64_t gap = geometric_skip(rng, p);
            if (gap == ~0ull || loc + gap >= num_locations) break;
            loc += gap;
            faults.push_back(loc);
            ++loc;
        }
        return faults;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t loc = 0; loc < num_locations; ++loc)
        if (u(rng) < spec.p_at(loc)) faults.push_back(loc);
    return faults;
}

// Uniform nontrivial Pauli on `support` qubits (3^k - 1 ... uniform over
// nonidentity assignments).
inline PauliWord random_nontrivial_pauli(std::size_t support, std::mt19937_64& rng) {
    PauliWord p(support);
    do {
        for (std::size_t q = 0; q < support; ++q) {
            switch (rng() % 4) {
                case 0: break;
                case 1: p.x.set(q, true), p.z.set(q, false); break;
                case 2: p.x.set(q, false), p.z.set(q, true); break;
                case 3: p.x.set(q, true), p.z.set(q, true); break;
            }
        }
        if (p.x.any() || p.z.any()) return p;
        // resample the all-identity draw
    } while (true);
}

// Def.-4 style sampling: independent Bernoulli per data qubit (uniform
// nontrivial single-qubit Pauli of the requested side) and per syndrome bit.
struct QubitSyndromeNoise {
    BitVec data;      // error locations on the N data qubits
    BitVec syndrome;  // flipped syndrome bits (Delta)
};

inline QubitSyndromeNoise sample_qubit_syndrome_noise(std::size_t n_qubits, std::size_t n_checks, double p_phys,
                                                      double p_synd, uint64_t seed, uint64_t trial = 0) {
    if (p_phys < 0 || p_phys > 1 || p_synd < 0 || p_synd > 1)
        throw std::invalid_argument("noise: probability outside [0,1]");
    auto rng = make_rng(seed, trial);
    QubitSyndromeNoise out{BitVec(n_qubits), BitVec(n_checks)};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t q = 0; q < n_qubits; ++q)
        if (u(rng) < p_phys) out.data.set(q, true);
    for (std::size_t c = 0; c < n_checks; ++c)
        if (u(rng) < p_synd) out.syndrome.set(c, true);
    return out;
}

}  // namespace ftqc
