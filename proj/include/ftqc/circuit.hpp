#pragma once

// The shared circuit representation: time-stepped locations over qubits (or
// registers, for intermediate circuits), classical bits, classical compute
// steps, and guard bits for conditionally executed segments (verified-prep
// retries). Structural validation and size accounting live here.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftqc/clifford.hpp"
#include "ftqc/codes.hpp"

namespace ftqc {

// Physical / elementary operation kinds. The physical set is Assumption-1
// restricted; register-level (intermediate) circuits reuse the same struct
// with register ids and the Elem* kinds.
enum class OpKind : uint8_t {
    Prep0,
    PrepT,
    MeasureZ,
    Gate,         // payload: Gate (Clifford or T/Tdg)
    Wait,
    CondPauli,    // X^{b_x} Z^{b_z} with classical controls (on-demand Pauli)
    CondClifford, // S^{b} with a classical control (on-demand {I,S} Clifford)
    FrameSelect,  // copy the quantum wire content of src onto this qubit when guard fires
    // register-level elementary operations
    ElemPrepZero,
    ElemPrepClifford,
    ElemPrepMagic,
    ElemCnot,
    ElemPauli,
    ElemMeasureZK,
    ElemBellMeas,
    ElemWait,
    GadgetBegin,  // structural marker
    GadgetEnd,
};

inline bool is_register_kind(OpKind k) {
    return k >= OpKind::ElemPrepZero && k <= OpKind::ElemWait;
}

constexpr std::size_t kNoBit = ~std::size_t(0);

struct Location {
    std::size_t t = 0;  // operations at depth t+1 sit between steps t and t+1
    OpKind kind = OpKind::Wait;
    Gate gate = Gate::I;               // for Gate kind
    std::vector<std::size_t> qubits;   // 1 or 2 qubit (or register) ids
    std::size_t c_out = kNoBit;        // bit produced by MeasureZ / ElemMeas
    std::size_t bx = kNoBit, bz = kNoBit;  // classical controls for CondPauli/CondClifford
    std::size_t guard = kNoBit;        // execute only if guard bit == 1
    bool guard_negate = false;         // ... or == 0 when negated
    std::size_t src = kNoBit;          // FrameSelect source qubit
    int tag = 0;                       // free-form marker (gadget ids etc.)
};

// Classical compute steps run between time steps; each consumes input bits
// and produces output bits. The simulator re-evaluates them per trial.
enum class ClassicalKind : uint8_t {
    Parity,          // out[0] = xor of inputs
    HammingSteane,   // in: 7 measurement bits -> out: 7 corrected bits
    SsfDecode,       // in: M syndrome bits -> out: N recovery bits + flag
    CorrectDecode,   // same, clean-syndrome contract
    LogicalExpand,   // in: 2K logical symplectic bits -> out: 2N physical bits
    Copy,            // out = in
    Const,           // out = constant payload
    NotAllZero,      // out[0] = 1 iff any input set (verification failure)
    AndNot,          // out[0] = in[0] & !in[1]
    SConj,           // conjugate a symplectic pair by S^b per qubit:
                     // in = [x(k) | z(k) | b(k)], out = [x | z ^ (x&b)]
    SymplecticMul,   // in: 2m bits -> out: 2m bits, row-vector times gamma
};

struct ClassicalStep {
    std::size_t t = 0;                // runs between steps t and t+1, after quantum ops at t
    ClassicalKind kind = ClassicalKind::Copy;
    std::vector<std::size_t> in_bits;
    std::vector<std::size_t> out_bits;
    std::size_t guard = kNoBit;
    bool guard_negate = false;
    int payload = 0;                   // constant payload (Const)
    int code_idx = -1;                 // index into Circuit::code_table
    int clifford_idx = -1;             // index into Circuit::clifford_table
    int side = 0;                      // 0 = X errors, 1 = Z errors
    std::size_t wait_depth = 0;        // classical runtime in wait steps; T for SsfDecode
};

struct Circuit {
    std::size_t width = 0;        // qubit (or register) count
    std::size_t num_bits = 0;     // classical register size
    bool open_circuit = false;    // open: may end on live qubits
    bool register_level = false;  // ids are registers, ops are Elem*
    std::vector<Location> locations;       // sorted by t on finalize
    std::vector<ClassicalStep> classical;  // sorted by t
    std::vector<CssCode> code_table;
    std::vector<CliffordMap> clifford_table;

    int add_code(const CssCode& code) {
        for (std::size_t i = 0; i < code_table.size(); ++i)
            if (code_table[i].n_phys == code.n_phys && code_table[i].pcp.h_x == code.pcp.h_x &&
                code_table[i].pcp.h_z == code.pcp.h_z)
                return int(i);
        code_table.push_back(code);
        return int(code_table.size() - 1);
    }
    int add_clifford(const CliffordMap& c) {
        clifford_table.push_back(c);
        return int(clifford_table.size() - 1);
    }

    std::size_t alloc_bit() { return num_bits++; }
    std::size_t alloc_bits(std::size_t k) {
        std::size_t first = num_bits;
        num_bits += k;
        return first;
    }

    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& l : locations) d = std::max(d, l.t + 1);
        for (const auto& c : classical) d = std::max(d, c.t + std::max<std::size_t>(c.wait_depth, 0));
        return d;
    }

    void finalize() {
        std::stable_sort(locations.begin(), locations.end(),
                         [](const Location& a, const Location& b) { return a.t < b.t; });
        std::stable_sort(classical.begin(), classical.end(),
                         [](const ClassicalStep& a, const ClassicalStep& b) { return a.t < b.t; });
    }
};

struct Violation {
    std::size_t t;
    std::size_t qubit;
    std::string what;
};

// Structural validation: at most one operation per qubit per step; closed
// circuits begin with preparations and end with measurements on every wire;
// arities match. Returns violations instead of throwing.
inline std::vector<Violation> validate(const Circuit& c) {
    std::vector<Violation> out;
    std::map<std::pair<std::size_t, std::size_t>, int> busy;
    for (const auto& l : c.locations) {
        if (l.kind == OpKind::GadgetBegin || l.kind == OpKind::GadgetEnd) continue;
        for (auto q : l.qubits) {
            if (q >= c.width) {
                out.push_back({l.t, q, "qubit id out of range"});
                continue;
            }
            auto key = std::make_pair(l.t, q);
            if (++busy[key] > 1) out.push_back({l.t, q, "two operations on one qubit in one step"});
        }
        bool two = l.kind == OpKind::Gate && gate_is_two_qubit(l.gate);
        two = two || l.kind == OpKind::ElemCnot || l.kind == OpKind::ElemBellMeas || l.kind == OpKind::FrameSelect;
        std::size_t want = two ? 2 : 1;
        if (l.kind == OpKind::FrameSelect) want = 1;  // src kept separately
        if (l.qubits.size() != want) out.push_back({l.t, l.qubits.empty() ? 0 : l.qubits[0], "arity mismatch"});
    }
    if (!c.open_circuit && !c.register_level) {
        // closed circuits: prep at first use, measurement at last use, no
        // mid-circuit measurement on the unitarily evolving wires
        std::map<std::size_t, std::vector<const Location*>> per_qubit;
        for (const auto& l : c.locations)
            for (auto q : l.qubits)
                if (q < c.width) per_qubit[q].push_back(&l);
        for (auto& [q, ls] : per_qubit) {
            if (ls.front()->kind != OpKind::Prep0 && ls.front()->kind != OpKind::PrepT)
                out.push_back({ls.front()->t, q, "closed circuit wire does not start with a preparation"});
            for (std::size_t i = 0; i + 1 < ls.size(); ++i)
                if (ls[i]->kind == OpKind::MeasureZ && ls[i]->guard == kNoBit)
                    out.push_back({ls[i]->t, q, "mid-circuit measurement in closed circuit"});
            if (ls.back()->kind != OpKind::MeasureZ)
                out.push_back({ls.back()->t, q, "closed circuit wire does not end with a measurement"});
        }
    }
    return out;
}

// max concurrently allocated wires (allocation = preparation, release =
// measurement), the width figure of the physical model
inline std::size_t allocated_width(const Circuit& c) {
    std::map<std::size_t, long> delta;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> interval;  // wire -> [prep,meas]
    for (const auto& l : c.locations) {
        if (l.kind == OpKind::Prep0 || l.kind == OpKind::PrepT) {
            auto it = interval.find(l.qubits[0]);
            // first allocation wins for profile purposes (re-preparations of
            // a measured wire extend its liveness conservatively)
            if (it == interval.end()) interval[l.qubits[0]] = {l.t, l.t};
        }
    }
    for (const auto& l : c.locations)
        for (auto q : l.qubits) {
            auto it = interval.find(q);
            if (it == interval.end()) continue;
            it->second.second = std::max(it->second.second, l.t);
        }
    for (auto& [q, iv] : interval) {
        delta[iv.first] += 1;
        delta[iv.second + 1] -= 1;
    }
    long live = 0;
    std::size_t peak = 0;
    for (auto& [t, d] : delta) {
        live += d;
        peak = std::max(peak, std::size_t(std::max<long>(live, 0)));
    }
    return peak;
}

struct SizeMetrics {
    std::size_t width;
    std::size_t depth;
    std::size_t size;  // |C| = W * D for closed constant-width circuits
};

inline SizeMetrics size_metrics(const Circuit& c) {
    SizeMetrics m{c.width, c.depth(), 0};
    m.size = m.width * m.depth;
    return m;
}

namespace detail {
inline void merge_tables(Circuit& r, const Circuit& b, std::vector<int>& code_map, std::vector<int>& cliff_map) {
    code_map.resize(b.code_table.size());
    for (std::size_t i = 0; i < b.code_table.size(); ++i) code_map[i] = r.add_code(b.code_table[i]);
    cliff_map.resize(b.clifford_table.size());
    for (std::size_t i = 0; i < b.clifford_table.size(); ++i) cliff_map[i] = r.add_clifford(b.clifford_table[i]);
}
inline void remap_step(ClassicalStep& s, const std::vector<int>& code_map, const std::vector<int>& cliff_map) {
    if (s.code_idx >= 0) s.code_idx = code_map[std::size_t(s.code_idx)];
    if (s.clifford_idx >= 0) s.clifford_idx = cliff_map[std::size_t(s.clifford_idx)];
}
}  // namespace detail

inline Circuit pad_width(Circuit c, std::size_t w) {
    if (w < c.width) throw std::invalid_argument("pad_width: cannot shrink");
    c.width = w;
    return c;
}

inline Circuit compose_serial(const Circuit& a, const Circuit& b) {
    if (a.width != b.width) throw std::invalid_argument("compose_serial: width mismatch");
    if (a.register_level != b.register_level) throw std::invalid_argument("compose_serial: level mismatch");
    Circuit r = a;
    std::vector<int> code_map, cliff_map;
    detail::merge_tables(r, b, code_map, cliff_map);
    std::size_t shift = a.depth();
    std::size_t bit_shift = a.num_bits;
    for (auto l : b.locations) {
        l.t += shift;
        if (l.c_out != kNoBit) l.c_out += bit_shift;
        if (l.bx != kNoBit) l.bx += bit_shift;
        if (l.bz != kNoBit) l.bz += bit_shift;
        if (l.guard != kNoBit) l.guard += bit_shift;
        r.locations.push_back(std::move(l));
    }
    for (auto s : b.classical) {
        s.t += shift;
        for (auto& x : s.in_bits) x += bit_shift;
        for (auto& x : s.out_bits) x += bit_shift;
        if (s.guard != kNoBit) s.guard += bit_shift;
        detail::remap_step(s, code_map, cliff_map);
        r.classical.push_back(std::move(s));
    }
    r.num_bits = a.num_bits + b.num_bits;
    r.open_circuit = b.open_circuit;
    r.finalize();
    return r;
}

// Parallel composition on disjoint qubits; widths add, depths max-align
// (shorter side is implicitly waiting).
inline Circuit compose_parallel(const Circuit& a, const Circuit& b) {
    if (a.register_level != b.register_level) throw std::invalid_argument("compose_parallel: level mismatch");
    Circuit r = a;
    std::vector<int> code_map, cliff_map;
    detail::merge_tables(r, b, code_map, cliff_map);
    std::size_t qshift = a.width;
    std::size_t bit_shift = a.num_bits;
    for (auto l : b.locations) {
        for (auto& q : l.qubits) q += qshift;
        if (l.src != kNoBit) l.src += qshift;
        if (l.c_out != kNoBit) l.c_out += bit_shift;
        if (l.bx != kNoBit) l.bx += bit_shift;
        if (l.bz != kNoBit) l.bz += bit_shift;
        if (l.guard != kNoBit) l.guard += bit_shift;
        r.locations.push_back(std::move(l));
    }
    for (auto s : b.classical) {
        for (auto& x : s.in_bits) x += bit_shift;
        for (auto& x : s.out_bits) x += bit_shift;
        if (s.guard != kNoBit) s.guard += bit_shift;
        detail::remap_step(s, code_map, cliff_map);
        r.classical.push_back(std::move(s));
    }
    r.width = a.width + b.width;
    r.num_bits = a.num_bits + b.num_bits;
    r.open_circuit = a.open_circuit || b.open_circuit;
    r.finalize();
    return r;
}

// --- text format ---------------------------------------------------------
// Header: `WIDTH <W> DEPTH <D> MODE <open|closed>`; one location per line:
// `t=<int> op=<name> q=<i[,j]> [c_in=<id>] [c_out=<id>]`.

inline const char* op_text_name(const Location& l) {
    switch (l.kind) {
        case OpKind::Prep0: return "prep0";
        case OpKind::PrepT: return "prepT";
        case OpKind::MeasureZ: return "measureZ";
        case OpKind::Wait: return "wait";
        case OpKind::Gate: return gate_name(l.gate);
        default: return nullptr;
    }
}

inline void write_circuit(std::ostream& os, const Circuit& c) {
    os << "WIDTH " << c.width << " DEPTH " << c.depth() << " MODE " << (c.open_circuit ? "open" : "closed") << '\n';
    for (const auto& l : c.locations) {
        const char* name = op_text_name(l);
        if (!name) throw std::runtime_error("write_circuit: kind has no text form");
        os << "t=" << l.t << " op=" << name << " q=";
        for (std::size_t i = 0; i < l.qubits.size(); ++i) os << (i ? "," : "") << l.qubits[i];
        if (l.c_out != kNoBit) os << " c_out=" << l.c_out;
        os << '\n';
    }
}

inline Circuit parse_circuit(std::istream& is) {
    Circuit c;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("circuit line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string kw, mode;
            std::size_t w, d;
            ls >> kw >> w;
            if (kw != "WIDTH") fail("expected WIDTH header");
            ls >> kw >> d;
            if (kw != "DEPTH") fail("expected DEPTH in header");
            ls >> kw >> mode;
            if (kw != "MODE" || (mode != "open" && mode != "closed")) fail("expected MODE open|closed");
            c.width = w;
            c.open_circuit = (mode == "open");
            have_header = true;
            continue;
        }
        Location l;
        std::string field;
        bool have_t = false, have_op = false, have_q = false;
        while (ls >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos) fail("malformed field '" + field + "'");
            std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            if (key == "t") {
                l.t = std::stoull(val);
                have_t = true;
            } else if (key == "op") {
                have_op = true;
                if (val == "prep0")
                    l.kind = OpKind::Prep0;
                else if (val == "prepT")
                    l.kind = OpKind::PrepT;
                else if (val == "measureZ")
                    l.kind = OpKind::MeasureZ;
                else if (val == "wait" || val == "I")
                    l.kind = OpKind::Wait;
                else {
                    l.kind = OpKind::Gate;
                    if (val == "X") l.gate = Gate::X;
                    else if (val == "Y") l.gate = Gate::Y;
                    else if (val == "Z") l.gate = Gate::Z;
                    else if (val == "H") l.gate = Gate::H;
                    else if (val == "S") l.gate = Gate::S;
                    else if (val == "Sdg" || val == "S+") l.gate = Gate::Sdg;
                    else if (val == "CNOT") l.gate = Gate::CNOT;
                    else if (val == "CZ") l.gate = Gate::CZ;
                    else if (val == "T") l.gate = Gate::T;
                    else if (val == "Tdg" || val == "T+") l.gate = Gate::Tdg;
                    else fail("unknown op '" + val + "'");
                }
            } else if (key == "q") {
                have_q = true;
                std::stringstream qs(val);
                std::string tok;
                while (std::getline(qs, tok, ',')) l.qubits.push_back(std::stoull(tok));
            } else if (key == "c_out") {
                l.c_out = std::stoull(val);
                c.num_bits = std::max(c.num_bits, l.c_out + 1);
            } else if (key == "c_in") {
                // accepted for forward compatibility; not used by parsers here
            } else {
                fail("unknown field '" + key + "'");
            }
        }
        if (!have_t || !have_op || !have_q) fail("location needs t=, op= and q=");
        if (l.kind == OpKind::MeasureZ && l.c_out == kNoBit) l.c_out = c.alloc_bit();
        c.locations.push_back(std::move(l));
    }
    if (!have_header) throw std::runtime_error("circuit: missing header");
    c.finalize();
    return c;
}

// Liveness-based wire compaction: remaps wires onto a minimal slot set so
// small-alive-width circuits fit the dense engine. Guarded measurements do
// not free their slot (conservative).
struct CompactResult {
    Circuit circuit;
    std::vector<std::size_t> final_slot;  // old wire -> slot at end (or ~0)
    std::size_t slots = 0;
};

inline CompactResult compact_wires(const Circuit& c) {
    CompactResult out;
    out.circuit = c;
    std::vector<std::size_t> slot_of(c.width, ~std::size_t(0));
    std::vector<std::size_t> free_slots;
    std::size_t next_slot = 0;
    auto acquire = [&](std::size_t w) {
        if (slot_of[w] != ~std::size_t(0)) return slot_of[w];
        std::size_t s;
        if (!free_slots.empty()) {
            s = free_slots.back();
            free_slots.pop_back();
        } else {
            s = next_slot++;
        }
        slot_of[w] = s;
        return s;
    };
    for (auto& l : out.circuit.locations) {
        if (l.src != kNoBit) l.src = acquire(l.src);
        for (auto& q : l.qubits) q = acquire(q);
        if (l.kind == OpKind::MeasureZ && l.guard == kNoBit) {
            // find the original wire that mapped here and free it
            for (std::size_t w = 0; w < c.width; ++w)
                if (slot_of[w] == l.qubits[0]) {
                    slot_of[w] = ~std::size_t(0);
                    break;
                }
            free_slots.push_back(l.qubits[0]);
        }
    }
    out.final_slot = slot_of;
    out.slots = next_slot;
    out.circuit.width = next_slot;
    return out;
}

// convenience builders
inline Location loc_gate(std::size_t t, Gate g, std::size_t q0, std::size_t q1 = kNoBit) {
    Location l;
    l.t = t;
    l.kind = OpKind::Gate;
    l.gate = g;
    l.qubits = {q0};
    if (q1 != kNoBit) l.qubits.push_back(q1);
    return l;
}
inline Location loc_simple(std::size_t t, OpKind k, std::size_t q) {
    Location l;
    l.t = t;
    l.kind = k;
    l.qubits = {q};
    return l;
}

}  // namespace ftqc
