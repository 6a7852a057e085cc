#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qobf/circuit.hpp"

namespace qobf {

struct TranspileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Basis = std::set<GateKind>;

inline Basis default_basis() {
    return {GateKind::rz, GateKind::rx, GateKind::x, GateKind::cx};
}

namespace detail {

constexpr double kPi = std::numbers::pi;

inline void check_basis(const Basis& b) {
    const bool diag = b.count(GateKind::rz) || b.count(GateKind::p);
    const bool mix = b.count(GateKind::rx) || b.count(GateKind::h);
    const bool ent = b.count(GateKind::cx) || b.count(GateKind::cz);
    if (!diag || !mix || !ent)
        throw TranspileError(
            "basis must contain a diagonal rotation (rz or p), a mixing gate "
            "(rx or h), and an entangler (cx or cz)");
}

// Phase-kind representative available in this basis, angle preserved.
inline GateApp phase_in_basis(const Basis& b, int qubit, double angle) {
    if (b.count(GateKind::rz)) return make_gate(GateKind::rz, {qubit}, {angle});
    return make_gate(GateKind::p, {qubit}, {angle});
}

inline void lower_gate(const Basis& b, const GateApp& g,
                       std::vector<GateApp>& out, int depth = 0) {
    if (depth > 8) throw TranspileError("decomposition recursion overflow");
    if (g.kind == GateKind::barrier || g.kind == GateKind::measure ||
        b.count(g.kind)) {
        out.push_back(g);
        return;
    }
    auto rec = [&](const GateApp& sub) { lower_gate(b, sub, out, depth + 1); };
    const int q = g.qubits.empty() ? 0 : g.qubits[0];
    switch (g.kind) {
        case GateKind::s:
        case GateKind::sdg:
        case GateKind::t:
        case GateKind::tdg:
        case GateKind::p:
        case GateKind::rz: {
            const double a = canonical_phase_angle(g.kind, g.params);
            if (b.count(GateKind::rz) || b.count(GateKind::p))
                out.push_back(phase_in_basis(b, q, a));
            else  // Rz(a) = H Rx(a) H
                for (const auto& sub :
                     {make_gate(GateKind::h, {q}),
                      make_gate(GateKind::rx, {q}, {a}),
                      make_gate(GateKind::h, {q})})
                    rec(sub);
            return;
        }
        case GateKind::h:  // Rz(pi/2) Rx(pi/2) Rz(pi/2) = H up to phase
            for (const auto& sub :
                 {make_gate(GateKind::rz, {q}, {kPi / 2}),
                  make_gate(GateKind::rx, {q}, {kPi / 2}),
                  make_gate(GateKind::rz, {q}, {kPi / 2})})
                rec(sub);
            return;
        case GateKind::x:
            if (b.count(GateKind::rx)) {
                rec(make_gate(GateKind::rx, {q}, {kPi}));
            } else {  // H Rz(pi) H = X up to phase
                rec(make_gate(GateKind::h, {q}));
                rec(make_gate(GateKind::rz, {q}, {kPi}));
                rec(make_gate(GateKind::h, {q}));
            }
            return;
        case GateKind::y:  // X Rz(pi) = Y up to phase
            rec(make_gate(GateKind::rz, {q}, {kPi}));
            rec(make_gate(GateKind::x, {q}));
            return;
        case GateKind::z:
            rec(make_gate(GateKind::rz, {q}, {kPi}));
            return;
        case GateKind::rx:  // H Rz(a) H
            rec(make_gate(GateKind::h, {q}));
            rec(make_gate(GateKind::rz, {q}, {g.params.at(0)}));
            rec(make_gate(GateKind::h, {q}));
            return;
        case GateKind::ry:  // Rz(pi/2) Rx(a) Rz(-pi/2) applied in this order
            rec(make_gate(GateKind::rz, {q}, {-kPi / 2}));
            rec(make_gate(GateKind::rx, {q}, {g.params.at(0)}));
            rec(make_gate(GateKind::rz, {q}, {kPi / 2}));
            return;
        case GateKind::cx: {
            const int c = g.qubits.at(0), t = g.qubits.at(1);
            if (!b.count(GateKind::cz))
                throw TranspileError("no rule lowers cx into this basis");
            rec(make_gate(GateKind::h, {t}));
            rec(make_gate(GateKind::cz, {c, t}));
            rec(make_gate(GateKind::h, {t}));
            return;
        }
        case GateKind::cz: {
            const int c = g.qubits.at(0), t = g.qubits.at(1);
            rec(make_gate(GateKind::h, {t}));
            rec(make_gate(GateKind::cx, {c, t}));
            rec(make_gate(GateKind::h, {t}));
            return;
        }
        case GateKind::swap: {
            const int a = g.qubits.at(0), c = g.qubits.at(1);
            rec(make_gate(GateKind::cx, {a, c}));
            rec(make_gate(GateKind::cx, {c, a}));
            rec(make_gate(GateKind::cx, {a, c}));
            return;
        }
        case GateKind::ccx: {
            const int a = g.qubits.at(0), c = g.qubits.at(1),
                      t = g.qubits.at(2);
            for (const auto& sub : std::vector<GateApp>{
                     make_gate(GateKind::h, {t}),
                     make_gate(GateKind::cx, {c, t}),
                     make_gate(GateKind::tdg, {t}),
                     make_gate(GateKind::cx, {a, t}),
                     make_gate(GateKind::t, {t}),
                     make_gate(GateKind::cx, {c, t}),
                     make_gate(GateKind::tdg, {t}),
                     make_gate(GateKind::cx, {a, t}),
                     make_gate(GateKind::t, {c}),
                     make_gate(GateKind::t, {t}),
                     make_gate(GateKind::h, {t}),
                     make_gate(GateKind::cx, {a, c}),
                     make_gate(GateKind::t, {a}),
                     make_gate(GateKind::tdg, {c}),
                     make_gate(GateKind::cx, {a, c})})
                rec(sub);
            return;
        }
        default:
            throw TranspileError("no rule lowers '" +
                                 std::string(kind_name(g.kind)) +
                                 "' into this basis");
    }
}

inline bool is_involution(GateKind k) {
    switch (k) {
        case GateKind::h: case GateKind::x: case GateKind::y:
        case GateKind::z: case GateKind::cx: case GateKind::cz:
        case GateKind::swap: case GateKind::ccx:
            return true;
        default:
            return false;
    }
}

inline bool is_rotation(GateKind k) {
    return k == GateKind::rz || k == GateKind::rx || k == GateKind::ry ||
           k == GateKind::p;
}

inline bool share_qubit(const GateApp& a, const GateApp& b) {
    for (int qa : a.qubits)
        for (int qb : b.qubits)
            if (qa == qb) return true;
    return false;
}

// Adjacent-inverse cancellation and rotation fusion, iterated to fixpoint.
// "Adjacent" means the next gate touching any of this gate's qubits.
inline void peephole(std::vector<GateApp>& gates) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < gates.size() && !changed; ++i) {
            const GateApp& g = gates[i];
            if (g.kind == GateKind::measure) continue;
            for (std::size_t j = i + 1; j < gates.size(); ++j) {
                if (!share_qubit(g, gates[j])) continue;
                const GateApp& h = gates[j];
                if (is_involution(g.kind) && h.kind == g.kind &&
                    h.qubits == g.qubits) {
                    gates.erase(gates.begin() + j);
                    gates.erase(gates.begin() + i);
                    changed = true;
                } else if (is_rotation(g.kind) && h.kind == g.kind &&
                           h.qubits == g.qubits) {
                    const double sum = g.params.at(0) + h.params.at(0);
                    gates.erase(gates.begin() + j);
                    if (sum == 0.0)
                        gates.erase(gates.begin() + i);
                    else
                        gates[i].params[0] = sum;
                    changed = true;
                }
                break;  // only the immediately-adjacent neighbour counts
            }
        }
    }
}

}  // namespace detail

// Barrier-respecting lowering into `basis` with peephole cleanup. A region
// holding only phase-class gates is a locked layer: it passes through with
// every angle untouched (kinds may be renamed to fit the basis) and is
// exempt from optimization.
inline Circuit transpile(const Circuit& input, const Basis& basis) {
    input.validate();
    detail::check_basis(basis);
    Circuit out;
    out.qubit_count = input.qubit_count;
    out.cbit_count = input.cbit_count;
    out.qregs = input.qregs;
    out.cregs = input.cregs;

    std::vector<GateApp> region;
    auto flush = [&](bool) {
        if (region.empty()) return;
        bool pure_phase = true;
        for (const auto& g : region)
            if (!is_phase_kind(g.kind)) pure_phase = false;
        if (pure_phase) {
            for (const auto& g : region)
                out.gates.push_back(detail::phase_in_basis(
                    basis, g.qubits.at(0),
                    canonical_phase_angle(g.kind, g.params)));
        } else {
            std::vector<GateApp> lowered;
            for (const auto& g : region) detail::lower_gate(basis, g, lowered);
            detail::peephole(lowered);
            for (auto& g : lowered) out.gates.push_back(std::move(g));
        }
        region.clear();
    };
    for (const auto& g : input.gates) {
        if (g.kind == GateKind::barrier) {
            flush(true);
            out.gates.push_back(g);
        } else {
            region.push_back(g);
        }
    }
    flush(false);
    out.validate();
    return out;
}

inline Circuit transpile(const Circuit& input) {
    return transpile(input, default_basis());
}

}  // namespace qobf
