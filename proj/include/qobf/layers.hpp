#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/dag.hpp"

namespace qobf {

enum class LayerTag : std::uint8_t { mixed, nonphase, phase, dummy, barrier };

struct Layer {
    LayerTag tag = LayerTag::mixed;
    std::vector<GateApp> gates;  // pairwise-disjoint qubit sets

    bool computational() const {
        if (tag == LayerTag::barrier) return false;
        for (const auto& g : gates)
            if (g.kind != GateKind::measure && g.kind != GateKind::barrier)
                return true;
        return false;
    }
};

struct LayerList {
    int qubit_count = 0;
    int cbit_count = 0;
    std::vector<Layer> layers;
};

namespace detail {

inline void check_disjoint(const Layer& layer) {
    std::vector<int> seen;
    for (const auto& g : layer.gates)
        for (int q : g.qubits) {
            if (std::find(seen.begin(), seen.end(), q) != seen.end())
                throw std::logic_error("layer gates share a qubit");
            seen.push_back(q);
        }
}

}  // namespace detail

// ASAP leveling: each gate lands one past its deepest predecessor. Measures
// are pinned after every non-measure gate on their qubit by an extra
// dependency so they never migrate into computational layers.
inline LayerList extract_layers(const CircuitDag& dag) {
    const Circuit& c = *dag.circuit;
    const int n = static_cast<int>(c.gates.size());
    std::vector<int> level(n, 0);
    int max_nonmeasure = 0;
    for (int i = 0; i < n; ++i) {
        int lv = 1;
        for (int p : dag.pred[i]) lv = std::max(lv, level[p] + 1);
        level[i] = lv;
        if (c.gates[i].kind != GateKind::measure)
            max_nonmeasure = std::max(max_nonmeasure, lv);
    }
    for (int i = 0; i < n; ++i)
        if (c.gates[i].kind == GateKind::measure)
            level[i] = std::max(level[i], max_nonmeasure + 1);

    int depth = 0;
    for (int i = 0; i < n; ++i) depth = std::max(depth, level[i]);
    LayerList out;
    out.qubit_count = c.qubit_count;
    out.cbit_count = c.cbit_count;
    out.layers.resize(depth);
    for (int i = 0; i < n; ++i)
        out.layers[level[i] - 1].gates.push_back(c.gates[i]);
    for (auto& layer : out.layers) {
        detail::check_disjoint(layer);
        bool any_phase = false, any_non = false;
        for (const auto& g : layer.gates) {
            if (g.kind == GateKind::barrier) {
                layer.tag = LayerTag::barrier;
            }
            (is_phase_kind(g.kind) ? any_phase : any_non) = true;
        }
        if (layer.tag != LayerTag::barrier)
            layer.tag = any_phase ? (any_non ? LayerTag::mixed : LayerTag::phase)
                                  : LayerTag::nonphase;
    }
    return out;
}

// Divides every mixed layer into its non-phase part followed by its phase
// part, and places a barrier layer after each phase layer. Per-qubit gate
// order is untouched: the two parts act on disjoint qubits.
inline LayerList split_phase_layers(const LayerList& in) {
    LayerList out;
    out.qubit_count = in.qubit_count;
    out.cbit_count = in.cbit_count;
    for (const auto& layer : in.layers) {
        if (layer.tag == LayerTag::barrier) {
            out.layers.push_back(layer);
            continue;
        }
        Layer nonphase{LayerTag::nonphase, {}};
        Layer phase{LayerTag::phase, {}};
        for (const auto& g : layer.gates)
            (is_phase_kind(g.kind) ? phase : nonphase).gates.push_back(g);
        if (!nonphase.gates.empty()) out.layers.push_back(std::move(nonphase));
        if (!phase.gates.empty()) {
            out.layers.push_back(std::move(phase));
            out.layers.push_back(Layer{LayerTag::barrier, {}});
        }
    }
    return out;
}

// Inverse of the split: barriers dropped, layers flattened back into one
// gate sequence. Gates inside a layer are ordered by first qubit so the
// result is deterministic.
inline Circuit merge_layers(const LayerList& in) {
    Circuit c;
    c.qubit_count = in.qubit_count;
    c.cbit_count = in.cbit_count;
    c.qregs["q"] = {0, in.qubit_count};
    if (in.cbit_count > 0) c.cregs["c"] = {0, in.cbit_count};
    for (const auto& layer : in.layers) {
        if (layer.tag == LayerTag::barrier) continue;
        auto gates = layer.gates;
        std::stable_sort(gates.begin(), gates.end(),
                         [](const GateApp& a, const GateApp& b) {
                             return a.qubits.at(0) < b.qubits.at(0);
                         });
        for (auto& g : gates)
            if (g.kind != GateKind::barrier) c.gates.push_back(std::move(g));
    }
    return c;
}

// Layer count under the fixed convention: a layer counts when it holds at
// least one computational gate; barrier layers count only when asked;
// measure-only layers never count.
inline int depth(const Circuit& c, bool count_barriers = false) {
    if (c.gates.empty()) return 0;
    LayerList ll = extract_layers(build_dag(c));
    int d = 0;
    for (const auto& layer : ll.layers) {
        if (layer.computational())
            ++d;
        else if (count_barriers && layer.tag == LayerTag::barrier)
            ++d;
    }
    return d;
}

}  // namespace qobf
