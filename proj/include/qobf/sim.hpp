#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/keystream.hpp"

namespace qobf {

using cdouble = std::complex<double>;

constexpr int kMaxSimQubits = 20;
constexpr int kMaxUnitaryQubits = 10;

// Dense amplitude vector; qubit q is bit q of the index (qubit 0 = LSB).
struct Statevector {
    int qubit_count = 0;
    std::vector<cdouble> amps;

    explicit Statevector(int n = 0) : qubit_count(n) {
        if (n > kMaxSimQubits)
            throw std::invalid_argument("statevector capped at 20 qubits");
        amps.assign(std::size_t{1} << n, cdouble{0.0, 0.0});
        if (!amps.empty()) amps[0] = 1.0;
    }

    double norm_sq() const {
        double s = 0;
        for (const auto& a : amps) s += std::norm(a);
        return s;
    }
};

namespace detail {

inline void apply_1q(Statevector& st, int q, cdouble u00, cdouble u01,
                     cdouble u10, cdouble u11) {
    const std::size_t bit = std::size_t{1} << q;
    const std::size_t dim = st.amps.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cdouble a = st.amps[i];
        const cdouble b = st.amps[i | bit];
        st.amps[i] = u00 * a + u01 * b;
        st.amps[i | bit] = u10 * a + u11 * b;
    }
}

// Phase-only kernel: multiplies the |1> branch; |0> branch untouched unless
// z0 differs from one (rz).
inline void apply_diag(Statevector& st, int q, cdouble z0, cdouble z1) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < st.amps.size(); ++i)
        st.amps[i] *= (i & bit) ? z1 : z0;
}

}  // namespace detail

// barrier and measure are no-ops here; measurement semantics live in the
// distribution helpers. x/cx/ccx/swap are pure index permutations so basis
// states stay exact.
inline void apply_gate(Statevector& st, const GateApp& g) {
    for (int q : g.qubits)
        if (q < 0 || q >= st.qubit_count)
            throw std::out_of_range("gate qubit outside statevector");
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    const cdouble i1{0.0, 1.0};
    switch (g.kind) {
        case GateKind::barrier:
        case GateKind::measure:
            return;
        case GateKind::h:
            detail::apply_1q(st, g.qubits[0], inv_sqrt2, inv_sqrt2, inv_sqrt2,
                             -inv_sqrt2);
            return;
        case GateKind::x: {
            const std::size_t bit = std::size_t{1} << g.qubits[0];
            for (std::size_t i = 0; i < st.amps.size(); ++i)
                if (!(i & bit)) std::swap(st.amps[i], st.amps[i | bit]);
            return;
        }
        case GateKind::y:
            detail::apply_1q(st, g.qubits[0], 0.0, -i1, i1, 0.0);
            return;
        case GateKind::z:
            detail::apply_diag(st, g.qubits[0], 1.0, -1.0);
            return;
        case GateKind::s:
            detail::apply_diag(st, g.qubits[0], 1.0, i1);
            return;
        case GateKind::sdg:
            detail::apply_diag(st, g.qubits[0], 1.0, -i1);
            return;
        case GateKind::t:
            detail::apply_diag(st, g.qubits[0], 1.0,
                               cdouble{inv_sqrt2, inv_sqrt2});
            return;
        case GateKind::tdg:
            detail::apply_diag(st, g.qubits[0], 1.0,
                               cdouble{inv_sqrt2, -inv_sqrt2});
            return;
        case GateKind::rz: {
            const double d = g.params.at(0);
            detail::apply_diag(st, g.qubits[0],
                               std::polar(1.0, -d / 2), std::polar(1.0, d / 2));
            return;
        }
        case GateKind::p:
            detail::apply_diag(st, g.qubits[0], 1.0,
                               std::polar(1.0, g.params.at(0)));
            return;
        case GateKind::rx: {
            const double h = g.params.at(0) / 2;
            const cdouble c{std::cos(h), 0.0}, s{0.0, -std::sin(h)};
            detail::apply_1q(st, g.qubits[0], c, s, s, c);
            return;
        }
        case GateKind::ry: {
            const double h = g.params.at(0) / 2;
            detail::apply_1q(st, g.qubits[0], std::cos(h), -std::sin(h),
                             std::sin(h), std::cos(h));
            return;
        }
        case GateKind::cx: {
            const std::size_t c = std::size_t{1} << g.qubits[0];
            const std::size_t t = std::size_t{1} << g.qubits[1];
            for (std::size_t i = 0; i < st.amps.size(); ++i)
                if ((i & c) && !(i & t)) std::swap(st.amps[i], st.amps[i | t]);
            return;
        }
        case GateKind::cz: {
            const std::size_t c = std::size_t{1} << g.qubits[0];
            const std::size_t t = std::size_t{1} << g.qubits[1];
            for (std::size_t i = 0; i < st.amps.size(); ++i)
                if ((i & c) && (i & t)) st.amps[i] = -st.amps[i];
            return;
        }
        case GateKind::swap: {
            const std::size_t a = std::size_t{1} << g.qubits[0];
            const std::size_t b = std::size_t{1} << g.qubits[1];
            for (std::size_t i = 0; i < st.amps.size(); ++i)
                if ((i & a) && !(i & b))
                    std::swap(st.amps[i], st.amps[(i & ~a) | b]);
            return;
        }
        case GateKind::ccx: {
            const std::size_t a = std::size_t{1} << g.qubits[0];
            const std::size_t b = std::size_t{1} << g.qubits[1];
            const std::size_t t = std::size_t{1} << g.qubits[2];
            for (std::size_t i = 0; i < st.amps.size(); ++i)
                if ((i & a) && (i & b) && !(i & t))
                    std::swap(st.amps[i], st.amps[i | t]);
            return;
        }
    }
    throw std::logic_error("unhandled gate kind");
}

inline Statevector run_statevector(const Circuit& c) {
    Statevector st(c.qubit_count);
    for (const auto& g : c.gates) apply_gate(st, g);
    return st;
}

// Classical-bit image of the circuit: cbit -> source qubit. Width is the
// declared classical register space, or every qubit when nothing measures.
struct MeasureMap {
    int bit_width = 0;
    std::vector<int> source;  // source[cbit] = qubit, -1 when never written
};

inline MeasureMap measure_map(const Circuit& c) {
    MeasureMap mm;
    bool any = false;
    for (const auto& g : c.gates)
        if (g.kind == GateKind::measure) any = true;
    if (!any) {
        mm.bit_width = c.qubit_count;
        mm.source.resize(c.qubit_count);
        for (int q = 0; q < c.qubit_count; ++q) mm.source[q] = q;
        return mm;
    }
    mm.bit_width = c.cbit_count;
    mm.source.assign(c.cbit_count, -1);
    for (const auto& g : c.gates)
        if (g.kind == GateKind::measure) mm.source[g.cbit] = g.qubits[0];
    return mm;
}

inline std::size_t project_outcome(std::size_t index, const MeasureMap& mm) {
    std::size_t out = 0;
    for (int b = 0; b < mm.bit_width; ++b) {
        const int q = mm.source[b];
        if (q >= 0 && (index >> q) & 1) out |= std::size_t{1} << b;
    }
    return out;
}

// Squared magnitudes marginalized onto the measured bits and renormalized.
// Renormalization keeps permutation-only circuits exactly on a point mass
// even after phase gates nudge the amplitude modulus in the last ulp.
inline std::vector<double> exact_distribution(const Circuit& c) {
    const Statevector st = run_statevector(c);
    const MeasureMap mm = measure_map(c);
    std::vector<double> probs(std::size_t{1} << mm.bit_width, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < st.amps.size(); ++i) {
        const double p = std::norm(st.amps[i]);
        probs[project_outcome(i, mm)] += p;
        total += p;
    }
    if (total <= 0.0) throw std::logic_error("state vector vanished");
    for (auto& p : probs) p /= total;
    return probs;
}

struct NoiseSpec {
    double probability = 0.0;  // per-gate Pauli injection chance
    std::uint64_t seed = 0;
};

namespace detail {

inline std::size_t draw_from_cdf(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

inline void inject_pauli(Statevector& st, SplitMix64& rng, const GateApp& g) {
    const int q = g.qubits[static_cast<std::size_t>(
        rng.next_below(g.qubits.size()))];
    switch (rng.next_below(3)) {
        case 0: apply_gate(st, make_gate(GateKind::x, {q})); break;
        case 1: apply_gate(st, make_gate(GateKind::y, {q})); break;
        default: apply_gate(st, make_gate(GateKind::z, {q})); break;
    }
}

}  // namespace detail

// Histogram over outcome indices. Each shot draws from its own splitmix64
// substream (seeded by the shot-indexed output of a master stream), so
// results never depend on evaluation order.
inline std::vector<std::uint64_t> sample_outcomes(
    const Circuit& c, std::uint64_t shots, std::uint64_t rng_seed,
    const std::optional<NoiseSpec>& noise = std::nullopt) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    const MeasureMap mm = measure_map(c);
    std::vector<std::uint64_t> hist(std::size_t{1} << mm.bit_width, 0);

    SplitMix64 master(rng_seed);
    std::vector<std::uint64_t> sub_seeds(shots);
    for (auto& s : sub_seeds) s = master.next();

    if (!noise || noise->probability <= 0.0) {
        const std::vector<double> probs = exact_distribution(c);
        for (std::uint64_t k = 0; k < shots; ++k) {
            SplitMix64 rng(sub_seeds[k]);
            ++hist[detail::draw_from_cdf(probs, rng.next_unit())];
        }
        return hist;
    }

    SplitMix64 noise_master(noise->seed);
    std::vector<std::uint64_t> noise_seeds(shots);
    for (auto& s : noise_seeds) s = noise_master.next();

    for (std::uint64_t k = 0; k < shots; ++k) {
        SplitMix64 rng(sub_seeds[k]);
        SplitMix64 nrng(noise_seeds[k]);
        Statevector st(c.qubit_count);
        for (const auto& g : c.gates) {
            apply_gate(st, g);
            if (g.kind == GateKind::barrier || g.kind == GateKind::measure)
                continue;
            if (nrng.next_unit() < noise->probability)
                detail::inject_pauli(st, nrng, g);
        }
        std::vector<double> probs(st.amps.size());
        double total = 0.0;
        for (std::size_t i = 0; i < st.amps.size(); ++i) {
            probs[i] = std::norm(st.amps[i]);
            total += probs[i];
        }
        for (auto& p : probs) p /= total;
        const std::size_t index =
            detail::draw_from_cdf(probs, rng.next_unit());
        ++hist[project_outcome(index, mm)];
    }
    return hist;
}

// Row-major dense matrix of the whole circuit, built column by column.
struct DenseUnitary {
    int qubit_count = 0;
    std::vector<cdouble> m;  // m[r * dim + c]

    std::size_t dim() const { return std::size_t{1} << qubit_count; }
};

inline DenseUnitary unitary(const Circuit& c) {
    if (c.qubit_count > kMaxUnitaryQubits)
        throw std::invalid_argument("unitary extraction capped at 10 qubits");
    for (const auto& g : c.gates)
        if (g.kind == GateKind::measure)
            throw std::invalid_argument(
                "unitary extraction requires a measure-free circuit");
    DenseUnitary u;
    u.qubit_count = c.qubit_count;
    const std::size_t dim = u.dim();
    u.m.assign(dim * dim, cdouble{0.0, 0.0});
    for (std::size_t col = 0; col < dim; ++col) {
        Statevector st(c.qubit_count);
        st.amps.assign(dim, cdouble{0.0, 0.0});
        st.amps[col] = 1.0;
        for (const auto& g : c.gates) apply_gate(st, g);
        for (std::size_t row = 0; row < dim; ++row)
            u.m[row * dim + col] = st.amps[row];
    }
    return u;
}

// Frobenius distance after aligning the global phase of b against a.
// Returns the raw distance; equivalent circuits land below 1e-9.
inline double global_phase_distance(const DenseUnitary& a,
                                    const DenseUnitary& b) {
    if (a.qubit_count != b.qubit_count)
        throw std::invalid_argument("unitary dimensions differ");
    const std::size_t dim = a.dim();
    cdouble tr{0.0, 0.0};
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            tr += std::conj(b.m[r * dim + c]) * a.m[r * dim + c];
    cdouble lambda{1.0, 0.0};
    if (std::abs(tr) > 1e-12) {
        lambda = tr / std::abs(tr);
    } else {
        // trace washed out; align on the largest element instead
        std::size_t best = 0;
        double mag = -1.0;
        for (std::size_t i = 0; i < dim * dim; ++i)
            if (std::abs(b.m[i]) > mag) {
                mag = std::abs(b.m[i]);
                best = i;
            }
        if (mag > 1e-12 && std::abs(a.m[best]) > 1e-12)
            lambda = (a.m[best] / b.m[best]) /
                     std::abs(a.m[best] / b.m[best]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < dim * dim; ++i)
        sum += std::norm(a.m[i] - lambda * b.m[i]);
    return std::sqrt(sum);
}

inline bool unitary_equivalent(const Circuit& a, const Circuit& b,
                               double tol = 1e-9) {
    return global_phase_distance(unitary(strip_measures(a)),
                                 unitary(strip_measures(b))) < tol;
}

}  // namespace qobf
