#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qobf/counts.hpp"
#include "qobf/layers.hpp"
#include "qobf/obfuscate.hpp"
#include "qobf/sim.hpp"

namespace qobf {

// Shot-count form: sum of absolute count differences over all 2^b outcomes,
// divided by 2N. Missing keys count zero.
inline double tvd_counts(const CountsDistribution& a,
                         const CountsDistribution& b) {
    if (a.shots != b.shots)
        throw std::invalid_argument("shot counts differ");
    if (a.bit_width != b.bit_width)
        throw std::invalid_argument("bit widths differ");
    if (a.shots == 0) throw std::invalid_argument("empty distributions");
    std::uint64_t absdiff = 0;
    for (const auto& [key, na] : a.counts) {
        auto it = b.counts.find(key);
        const std::uint64_t nb = it == b.counts.end() ? 0 : it->second;
        absdiff += na > nb ? na - nb : nb - na;
    }
    for (const auto& [key, nb] : b.counts)
        if (!a.counts.count(key)) absdiff += nb;
    return static_cast<double>(absdiff) / (2.0 * static_cast<double>(a.shots));
}

inline double tvd_exact(const std::vector<double>& p,
                        const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("distribution lengths differ");
    double s = 0.0, sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::fabs(p[i] - q[i]);
        sp += p[i];
        sq += q[i];
    }
    if (std::fabs(sp - 1.0) > 1e-9 || std::fabs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("inputs are not probability vectors");
    return s / 2.0;
}

// Sampled counts against a theoretical distribution on the same outcome
// space, on the Eq-style 2N scale: sum |y_i - N p_i| / 2N.
inline double tvd_counts_vs_exact(const CountsDistribution& counts,
                                  const std::vector<double>& probs) {
    if (probs.size() != (std::size_t{1} << counts.bit_width))
        throw std::invalid_argument("distribution width mismatch");
    const double n = static_cast<double>(counts.shots);
    double s = 0.0;
    std::vector<double> y(probs.size(), 0.0);
    for (const auto& [key, c] : counts.counts)
        y[outcome_index(key)] = static_cast<double>(c);
    for (std::size_t i = 0; i < probs.size(); ++i)
        s += std::fabs(y[i] - n * probs[i]);
    return s / (2.0 * n);
}

struct SimConfig {
    std::uint64_t shots = 1000;
    std::uint64_t rng_seed = 1;
    std::optional<NoiseSpec> noise;
    bool exact = false;  // skip sampling, compare exact distributions
};

struct TvdReport {
    double tvd_obf = 0.0;
    double tvd_deobf = 0.0;
    double tvd_orig = 0.0;
    double tvd_loss = 0.0;  // tvd_deobf - tvd_orig
    int depth_orig = 0;
    int depth_obf = 0;
    std::size_t phase_gates_orig = 0;
    std::size_t dummy_gates = 0;
    std::size_t equiv_key_bits = 0;
};

// All three TVDs share one baseline: the noiseless exact distribution of
// the original circuit.
inline TvdReport build_report(const Circuit& original, const Circuit& obf,
                              const Circuit& deobf, const PhaseRecord& record,
                              const SimConfig& cfg) {
    TvdReport rep;
    const std::vector<double> theory = exact_distribution(original);

    auto tvd_of = [&](const Circuit& c, int salt) -> double {
        if (cfg.exact) return tvd_exact(exact_distribution(c), theory);
        const MeasureMap mm = measure_map(c);
        if ((std::size_t{1} << mm.bit_width) != theory.size())
            throw std::invalid_argument("outcome widths differ");
        std::optional<NoiseSpec> noise = cfg.noise;
        if (noise) noise->seed += static_cast<std::uint64_t>(salt) * 0x9e3779b9;
        const auto hist = sample_outcomes(
            c, cfg.shots, cfg.rng_seed + static_cast<std::uint64_t>(salt),
            noise);
        return tvd_counts_vs_exact(counts_from_hist(hist, mm.bit_width),
                                   theory);
    };
    rep.tvd_orig = tvd_of(original, 0);
    rep.tvd_obf = tvd_of(obf, 1);
    rep.tvd_deobf = tvd_of(deobf, 2);
    rep.tvd_loss = rep.tvd_deobf - rep.tvd_orig;
    rep.depth_orig = depth(original);
    rep.depth_obf = depth(obf);
    for (const auto& g : original.gates)
        if (is_phase_kind(g.kind)) ++rep.phase_gates_orig;
    rep.dummy_gates = record.dummy_gate_count();
    rep.equiv_key_bits = key_bits(record);
    return rep;
}

}  // namespace qobf
