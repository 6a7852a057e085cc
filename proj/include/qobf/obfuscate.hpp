#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/keystream.hpp"
#include "qobf/layers.hpp"
#include "qobf/phase_record.hpp"

namespace qobf {

struct ObfError : std::runtime_error {
    enum class Code {
        midcircuit_measure,
        too_many_dummy_layers,
        fingerprint_mismatch,
        structure_mismatch,
    };
    Code code;
    ObfError(Code c, const std::string& what)
        : std::runtime_error(what), code(c) {}
};

struct ObfuscationResult {
    Circuit circuit;
    PhaseRecord record;
};

namespace detail {

inline void reject_midcircuit_measure(const Circuit& c) {
    std::vector<bool> measured(c.qubit_count, false);
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::barrier) continue;
        for (int q : g.qubits) {
            if (measured[q])
                throw ObfError(ObfError::Code::midcircuit_measure,
                               "qubit " + std::to_string(q) +
                                   " is used after being measured; "
                                   "mid-circuit measurement is unsupported");
            if (g.kind == GateKind::measure) measured[q] = true;
        }
    }
}

inline Circuit strip_barriers(const Circuit& c) {
    Circuit out = c;
    out.gates.clear();
    for (const auto& g : c.gates)
        if (g.kind != GateKind::barrier) out.gates.push_back(g);
    return out;
}

// Distinct values in [0, bound), ascending. Rejection keeps the draw
// unbiased and the order independent of bound.
inline std::vector<int> sample_distinct(std::uint64_t seed, int count,
                                        int bound) {
    SplitMix64 rng(seed);
    std::vector<int> out;
    while (static_cast<int>(out.size()) < count) {
        int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(bound)));
        if (std::find(out.begin(), out.end(), v) == out.end())
            out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

enum class RegionTag { plain, phase, dummy };

struct BuildRegion {
    RegionTag tag = RegionTag::plain;
    std::vector<GateApp> gates;
};

// Core of the forward pass, parameterized over the keystream so the
// zero-shift identity is testable in isolation.
inline ObfuscationResult obfuscate_with_keystream(const Circuit& input,
                                                  const KeySpec& key,
                                                  const KeyStream& stream) {
    input.validate();
    reject_midcircuit_measure(input);
    const Circuit base = strip_barriers(input);
    const int n = base.qubit_count;

    LayerList split = split_phase_layers(extract_layers(build_dag(base)));
    // Pre-existing barrier layers cannot appear: strip_barriers removed them.

    // Keystream order for existing gates: layer by layer, qubit-ascending.
    for (auto& layer : split.layers)
        std::stable_sort(layer.gates.begin(), layer.gates.end(),
                         [](const GateApp& a, const GateApp& b) {
                             return a.qubits.at(0) < b.qubits.at(0);
                         });

    std::size_t phase_gate_count = 0;
    std::size_t first_measure_layer = split.layers.size();
    for (std::size_t i = 0; i < split.layers.size(); ++i) {
        const auto& layer = split.layers[i];
        if (layer.tag == LayerTag::phase) phase_gate_count += layer.gates.size();
        for (const auto& g : layer.gates)
            if (g.kind == GateKind::measure) {
                first_measure_layer = std::min(first_measure_layer, i);
                break;
            }
    }

    // Dummy layers may go before any layer up to (and including) the
    // boundary just ahead of the first measure.
    const int slot_count = static_cast<int>(first_measure_layer) + 1;
    if (key.dummy_layer_count > slot_count)
        throw ObfError(ObfError::Code::too_many_dummy_layers,
                       "dummy_layer_count " +
                           std::to_string(key.dummy_layer_count) +
                           " exceeds the " + std::to_string(slot_count) +
                           " available insertion slots");
    const std::vector<int> slots =
        key.dummy_layer_count > 0
            ? sample_distinct(key.dummy_position_seed, key.dummy_layer_count,
                              slot_count)
            : std::vector<int>{};

    const std::size_t dummy_gates =
        static_cast<std::size_t>(key.dummy_layer_count) *
        static_cast<std::size_t>(n);
    if (stream.size() < phase_gate_count + dummy_gates)
        throw std::invalid_argument("keystream shorter than required");

    // Assemble the region sequence: plain runs, one region per phase layer,
    // dummy regions at their sampled slots.
    std::vector<BuildRegion> regions;
    auto plain_sink = [&regions]() -> BuildRegion& {
        if (regions.empty() || regions.back().tag != RegionTag::plain)
            regions.push_back({RegionTag::plain, {}});
        return regions.back();
    };

    PhaseRecord record;
    record.key_fingerprint = key_fingerprint(key);
    record.quantization = key.quantization;
    record.dummy_layer_count = key.dummy_layer_count;
    record.dummy_position_seed = key.dummy_position_seed;
    record.qubit_count = n;

    std::size_t next_existing = 0;  // keystream cursor for existing gates
    std::size_t next_dummy = phase_gate_count;
    std::size_t slot_cursor = 0;

    auto emit_dummy = [&](int /*slot*/) {
        BuildRegion region{RegionTag::dummy, {}};
        DummyLayer meta;
        meta.region_index = static_cast<int>(regions.size());
        for (int q = 0; q < n; ++q) {
            double angle = stream[next_dummy++];
            region.gates.push_back(make_gate(GateKind::rz, {q}, {angle}));
            meta.angles.push_back(angle);
        }
        regions.push_back(std::move(region));
        record.dummy_layers.push_back(std::move(meta));
    };

    for (std::size_t i = 0; i <= split.layers.size(); ++i) {
        while (slot_cursor < slots.size() &&
               slots[slot_cursor] == static_cast<int>(i)) {
            emit_dummy(slots[slot_cursor]);
            ++slot_cursor;
        }
        if (i == split.layers.size()) break;
        const Layer& layer = split.layers[i];
        if (layer.tag == LayerTag::barrier) continue;
        if (layer.tag == LayerTag::phase) {
            BuildRegion region{RegionTag::phase, {}};
            const int region_index = static_cast<int>(regions.size());
            for (const auto& g : layer.gates) {
                PhaseEntry e;
                e.region_index = region_index;
                e.qubit = g.qubits.at(0);
                e.original_kind = g.kind;
                e.original_angle = canonical_phase_angle(g.kind, g.params);
                const double shifted =
                    e.original_angle + stream[next_existing++];
                // Uniform parameterized representation: a shifted s/t gate is
                // no longer an s/t gate, and one kind per layer keeps the
                // locked layers structurally anonymous.
                region.gates.push_back(
                    make_gate(GateKind::p, {e.qubit}, {shifted}));
                record.entries.push_back(e);
            }
            regions.push_back(std::move(region));
            continue;
        }
        auto& sink = plain_sink();
        for (const auto& g : layer.gates) sink.gates.push_back(g);
    }

    // Flatten: locked (phase/dummy) regions are enclosed in barriers on both
    // sides; adjacent barriers collapse to one.
    Circuit out;
    out.qubit_count = base.qubit_count;
    out.cbit_count = base.cbit_count;
    out.qregs = base.qregs;
    out.cregs = base.cregs;
    GateApp barrier;
    barrier.kind = GateKind::barrier;
    barrier.qubits.resize(n);
    for (int q = 0; q < n; ++q) barrier.qubits[q] = q;
    auto emit_barrier = [&out, &barrier]() {
        if (!out.gates.empty() && out.gates.back().kind == GateKind::barrier)
            return;
        out.gates.push_back(barrier);
    };
    for (const auto& region : regions) {
        const bool locked = region.tag != RegionTag::plain;
        if (locked) emit_barrier();
        for (const auto& g : region.gates) out.gates.push_back(g);
        if (locked) emit_barrier();
    }
    out.validate();
    return {std::move(out), std::move(record)};
}

}  // namespace detail

inline ObfuscationResult obfuscate(const Circuit& circuit, const KeySpec& key) {
    // Count phase gates up front to size the stream; barriers are stripped
    // the same way the core pass does it.
    std::size_t census = 0;
    for (const auto& g : circuit.gates)
        if (is_phase_kind(g.kind)) ++census;
    const std::size_t need =
        census + static_cast<std::size_t>(std::max(0, key.dummy_layer_count)) *
                     static_cast<std::size_t>(circuit.qubit_count);
    return detail::obfuscate_with_keystream(circuit, key,
                                            derive_keystream(key, need));
}

inline Circuit deobfuscate(const Circuit& circuit, const PhaseRecord& record,
                           const KeySpec& key) {
    circuit.validate();
    if (key_fingerprint(key) != record.key_fingerprint)
        throw ObfError(ObfError::Code::fingerprint_mismatch,
                       "record fingerprint does not match the supplied key "
                       "configuration");

    auto regions = split_regions(circuit);
    std::vector<bool> drop(regions.size(), false);

    // Dummy layers are located purely by recorded position and content; the
    // seed plays no part, so a wrong key still removes them cleanly.
    for (const auto& d : record.dummy_layers) {
        if (d.region_index < 0 ||
            d.region_index >= static_cast<int>(regions.size()))
            throw ObfError(ObfError::Code::structure_mismatch,
                           "recorded dummy layer index " +
                               std::to_string(d.region_index) +
                               " has no matching barrier region");
        auto& region = regions[d.region_index];
        if (region.gates.size() != d.angles.size())
            throw ObfError(ObfError::Code::structure_mismatch,
                           "dummy region " + std::to_string(d.region_index) +
                               " width changed");
        std::vector<bool> seen(d.angles.size(), false);
        for (const auto& g : region.gates) {
            if (!is_phase_kind(g.kind) || g.kind == GateKind::s ||
                g.kind == GateKind::sdg || g.kind == GateKind::t ||
                g.kind == GateKind::tdg)
                throw ObfError(ObfError::Code::structure_mismatch,
                               "dummy region " +
                                   std::to_string(d.region_index) +
                                   " contains a non-dummy gate");
            const int q = g.qubits.at(0);
            if (q >= static_cast<int>(d.angles.size()) || seen[q] ||
                std::fabs(g.params.at(0) - d.angles[q]) > 1e-12)
                throw ObfError(ObfError::Code::structure_mismatch,
                               "dummy region " +
                                   std::to_string(d.region_index) +
                                   " does not match its record");
            seen[q] = true;
        }
        drop[d.region_index] = true;
    }

    const KeyStream stream = derive_keystream(key, record.entries.size());
    for (std::size_t k = 0; k < record.entries.size(); ++k) {
        const PhaseEntry& e = record.entries[k];
        if (e.region_index < 0 ||
            e.region_index >= static_cast<int>(regions.size()) ||
            drop[e.region_index])
            throw ObfError(ObfError::Code::structure_mismatch,
                           "recorded phase entry points at region " +
                               std::to_string(e.region_index) +
                               " which is missing or a dummy layer");
        auto& region = regions[e.region_index];
        GateApp* hit = nullptr;
        for (auto& g : region.gates) {
            if (!is_phase_kind(g.kind) || g.qubits.at(0) != e.qubit) continue;
            if (hit)
                throw ObfError(ObfError::Code::structure_mismatch,
                               "region " + std::to_string(e.region_index) +
                                   " holds multiple phase gates on qubit " +
                                   std::to_string(e.qubit));
            hit = &g;
        }
        if (!hit || hit->kind == GateKind::s || hit->kind == GateKind::sdg ||
            hit->kind == GateKind::t || hit->kind == GateKind::tdg)
            throw ObfError(ObfError::Code::structure_mismatch,
                           "region " + std::to_string(e.region_index) +
                               " lost the locked phase gate on qubit " +
                               std::to_string(e.qubit));
        const double restored = hit->params.at(0) - stream[k];
        GateApp g;
        g.qubits = {e.qubit};
        switch (e.original_kind) {
            case GateKind::rz:
                g.kind = GateKind::rz;
                g.params = {restored};
                break;
            case GateKind::p:
                g.kind = GateKind::p;
                g.params = {restored};
                break;
            default: {
                const double canon =
                    canonical_phase_angle(e.original_kind, {});
                if (std::fabs(restored - canon) < 1e-9) {
                    g.kind = e.original_kind;
                } else {
                    g.kind = GateKind::p;
                    g.params = {restored};
                }
            }
        }
        *hit = std::move(g);
    }

    Circuit out;
    out.qubit_count = circuit.qubit_count;
    out.cbit_count = circuit.cbit_count;
    out.qregs = circuit.qregs;
    out.cregs = circuit.cregs;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (drop[i]) continue;
        for (auto& g : regions[i].gates) out.gates.push_back(std::move(g));
    }
    out.validate();
    return out;
}

}  // namespace qobf
