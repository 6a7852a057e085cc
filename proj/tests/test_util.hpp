#pragma once

// Shared helpers for the test suite: corpus access, random circuit
// generation, and a chi-square tail probability for sampling tests.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/keystream.hpp"
#include "qobf/qasm.hpp"

namespace qobf_test {

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string benchmark_path(const std::string& name) {
    return std::string(QOBF_BENCHMARK_DIR) + "/" + name;
}

inline qobf::Circuit load_benchmark(const std::string& name) {
    return qobf::parse_qasm(read_text(benchmark_path(name)));
}

// Names of the corpus files that sit directly in the benchmark directory.
inline std::vector<std::string> reference_corpus() {
    return {"adder_n4.qasm", "basis_change_n3.qasm", "basis_trotter_n4.qasm",
            "fredkin_n3.qasm", "wstate_n3.qasm"};
}

// Random circuit over an explicit kind set. Angles, when a kind takes one,
// are uniform in (-2pi, 2pi). Appends a full measure row when `measured`.
inline qobf::Circuit random_circuit(qobf::SplitMix64& rng, int qubit_count,
                                    std::size_t gate_count,
                                    const std::vector<qobf::GateKind>& kinds,
                                    bool measured = true) {
    qobf::Circuit c =
        qobf::make_circuit(qubit_count, {}, measured ? qubit_count : 0);
    for (std::size_t i = 0; i < gate_count; ++i) {
        const qobf::GateKind kind =
            kinds[static_cast<std::size_t>(rng.next_below(kinds.size()))];
        const auto& info = qobf::info(kind);
        if (info.qubit_arity > qubit_count) {
            --i;
            continue;
        }
        std::vector<int> qubits;
        while (static_cast<int>(qubits.size()) < info.qubit_arity) {
            const int q = static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(qubit_count)));
            bool seen = false;
            for (int used : qubits) seen |= (used == q);
            if (!seen) qubits.push_back(q);
        }
        std::vector<double> params;
        for (int p = 0; p < info.param_arity; ++p)
            params.push_back((rng.next_unit() * 2.0 - 1.0) *
                             2.0 * 3.14159265358979323846);
        c.gates.push_back(qobf::GateApp{kind, qubits, params});
    }
    if (measured)
        for (int q = 0; q < qubit_count; ++q)
            c.gates.push_back(
                qobf::GateApp{qobf::GateKind::measure, {q}, {}, q});
    c.validate();
    return c;
}

// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
// continued fraction otherwise. Good to ~1e-12 for the ranges tests use.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    const double log_gamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
        return 1.0 - p;
    }
    // Lentz continued fraction for Q directly.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

// Chi-square goodness-of-fit p-value for observed counts against expected
// probabilities. Bins with expected probability 0 must hold 0 observations.
inline double chi_square_p(const std::vector<std::uint64_t>& observed,
                           const std::vector<double>& expected_prob,
                           std::uint64_t shots) {
    if (observed.size() != expected_prob.size())
        throw std::invalid_argument("chi_square_p size mismatch");
    double stat = 0.0;
    std::size_t dof = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expect =
            expected_prob[i] * static_cast<double>(shots);
        if (expect == 0.0) {
            if (observed[i] != 0) return 0.0;
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - expect;
        stat += diff * diff / expect;
        ++dof;
    }
    if (dof <= 1) return 1.0;
    return gamma_q(static_cast<double>(dof - 1) / 2.0, stat / 2.0);
}

}  // namespace qobf_test
