#pragma once

#include <algorithm>
#include <vector>

#include "qobf/circuit.hpp"

namespace qobf {

// Gate dependency DAG. Node i is circuit.gates[i]; edges connect consecutive
// gates sharing a qubit, so topological orders are exactly the reorderings
// that preserve per-qubit program order. Barriers depend on every qubit.
struct CircuitDag {
    const Circuit* circuit = nullptr;
    std::vector<std::vector<int>> succ;
    std::vector<std::vector<int>> pred;

    std::size_t node_count() const { return succ.size(); }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& s : succ) n += s.size();
        return n;
    }
};

inline CircuitDag build_dag(const Circuit& c) {
    CircuitDag dag;
    dag.circuit = &c;
    const int n = static_cast<int>(c.gates.size());
    dag.succ.assign(n, {});
    dag.pred.assign(n, {});
    std::vector<int> last(c.qubit_count, -1);
    for (int i = 0; i < n; ++i) {
        const auto& g = c.gates[i];
        const bool full_width = g.kind == GateKind::barrier;
        for (int q = 0; q < c.qubit_count; ++q) {
            if (!full_width &&
                std::find(g.qubits.begin(), g.qubits.end(), q) ==
                    g.qubits.end())
                continue;
            const int p = last[q];
            if (p >= 0 &&
                std::find(dag.pred[i].begin(), dag.pred[i].end(), p) ==
                    dag.pred[i].end()) {
                dag.pred[i].push_back(p);
                dag.succ[p].push_back(i);
            }
            last[q] = i;
        }
    }
    return dag;
}

}  // namespace qobf
