#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qobf/gates.hpp"

namespace qobf {

struct RegisterSpan {
    int offset = 0;
    int size = 0;
    bool operator==(const RegisterSpan&) const = default;
};

// Ordered gate sequence over one flattened qubit index space. Declared
// registers keep their names so emitted text mirrors the source layout.
struct Circuit {
    int qubit_count = 0;
    int cbit_count = 0;
    std::vector<GateApp> gates;
    std::map<std::string, RegisterSpan> qregs;
    std::map<std::string, RegisterSpan> cregs;

    void validate() const {
        for (const auto& g : gates) {
            const auto& in = info(g.kind);
            if (in.qubit_arity >= 0 &&
                static_cast<int>(g.qubits.size()) != in.qubit_arity)
                throw std::invalid_argument("gate arity mismatch");
            if (static_cast<int>(g.params.size()) != in.param_arity)
                throw std::invalid_argument("gate parameter count mismatch");
            for (int q : g.qubits)
                if (q < 0 || q >= qubit_count)
                    throw std::out_of_range("qubit index out of range");
            for (std::size_t i = 0; i < g.qubits.size(); ++i)
                for (std::size_t j = i + 1; j < g.qubits.size(); ++j)
                    if (g.qubits[i] == g.qubits[j])
                        throw std::invalid_argument("repeated qubit operand");
            if (g.kind == GateKind::measure &&
                (g.cbit < 0 || g.cbit >= cbit_count))
                throw std::out_of_range("classical bit index out of range");
        }
    }
};

inline Circuit make_circuit(int qubits, std::vector<GateApp> gates,
                            int cbits = 0) {
    Circuit c;
    c.qubit_count = qubits;
    c.cbit_count = cbits;
    c.qregs["q"] = {0, qubits};
    if (cbits > 0) c.cregs["c"] = {0, cbits};
    c.gates = std::move(gates);
    c.validate();
    return c;
}

// Structural equality: same kinds, operands, and angles within tol.
inline bool circuits_equal(const Circuit& a, const Circuit& b,
                           double tol = 1e-12) {
    if (a.qubit_count != b.qubit_count || a.cbit_count != b.cbit_count)
        return false;
    if (a.gates.size() != b.gates.size()) return false;
    for (std::size_t i = 0; i < a.gates.size(); ++i) {
        const auto& ga = a.gates[i];
        const auto& gb = b.gates[i];
        if (ga.kind != gb.kind || ga.qubits != gb.qubits ||
            ga.cbit != gb.cbit)
            return false;
        if (ga.params.size() != gb.params.size()) return false;
        for (std::size_t k = 0; k < ga.params.size(); ++k)
            if (std::fabs(ga.params[k] - gb.params[k]) > tol) return false;
    }
    return true;
}

// Maximal runs of non-barrier gates, in program order. Barrier-delimited
// region ordinals are the coordinate system the phase record uses, so both
// the obfuscator and the restorer must split identically.
struct Region {
    std::vector<GateApp> gates;
};

inline std::vector<Region> split_regions(const Circuit& c) {
    std::vector<Region> out;
    Region cur;
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::barrier) {
            if (!cur.gates.empty()) out.push_back(std::move(cur));
            cur = {};
        } else {
            cur.gates.push_back(g);
        }
    }
    if (!cur.gates.empty()) out.push_back(std::move(cur));
    return out;
}

inline Circuit strip_measures(const Circuit& c) {
    Circuit out = c;
    out.gates.clear();
    for (const auto& g : c.gates)
        if (g.kind != GateKind::measure) out.gates.push_back(g);
    return out;
}

inline bool region_is_pure_phase(const Region& r) {
    if (r.gates.empty()) return false;
    for (const auto& g : r.gates)
        if (!is_phase_kind(g.kind)) return false;
    return true;
}

}  // namespace qobf
