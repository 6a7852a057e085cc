#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qobf/gates.hpp"
#include "qobf/keystream.hpp"

namespace qobf {

// One original phase gate: where it sits in the obfuscated circuit
// (barrier-delimited region ordinal + qubit) and what it used to be.
struct PhaseEntry {
    int region_index = 0;
    int qubit = 0;
    GateKind original_kind = GateKind::p;
    double original_angle = 0.0;

    bool operator==(const PhaseEntry&) const = default;
};

struct DummyLayer {
    int region_index = 0;
    std::vector<double> angles;  // one per qubit, ascending qubit order

    bool operator==(const DummyLayer&) const = default;
};

// The designer-held secret sidecar. Entry order is keystream order:
// existing phase gates first (region by region, qubit-ascending inside a
// region), then dummy gates in insertion order.
struct PhaseRecord {
    std::uint64_t key_fingerprint = 0;
    Quantization quantization = Quantization::eighth_turns;
    int dummy_layer_count = 0;
    std::uint64_t dummy_position_seed = 0;
    int qubit_count = 0;
    std::vector<PhaseEntry> entries;
    std::vector<DummyLayer> dummy_layers;

    std::size_t dummy_gate_count() const {
        std::size_t n = 0;
        for (const auto& d : dummy_layers) n += d.angles.size();
        return n;
    }
};

// Every phase gate, existing or dummy, carries 3 key bits: its shift is one
// of the 8 distinguishable multiples of pi/4.
inline std::size_t key_bits(const PhaseRecord& record) {
    return 3 * (record.entries.size() + record.dummy_gate_count());
}

namespace detail {

inline nlohmann::ordered_json angle_json(double v) {
    // Serialized through a fixed %.17g rendering so files are byte-stable
    // and re-parse to the identical double.
    return nlohmann::ordered_json::parse(format_angle(v));
}

}  // namespace detail

inline std::string record_to_json(const PhaseRecord& r) {
    nlohmann::ordered_json j;
    j["format"] = "qobf-phase-record";
    j["version"] = 1;
    j["key_fingerprint"] = to_hex(r.key_fingerprint);
    j["quantization"] = quantization_name(r.quantization);
    j["dummy_layer_count"] = r.dummy_layer_count;
    j["dummy_position_seed"] = to_hex(r.dummy_position_seed);
    j["qubit_count"] = r.qubit_count;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
        nlohmann::ordered_json je;
        je["region_index"] = e.region_index;
        je["qubit"] = e.qubit;
        je["original_kind"] = std::string(kind_name(e.original_kind));
        je["original_angle"] = detail::angle_json(e.original_angle);
        j["entries"].push_back(std::move(je));
    }
    j["dummy_layers"] = nlohmann::ordered_json::array();
    for (const auto& d : r.dummy_layers) {
        nlohmann::ordered_json jd;
        jd["region_index"] = d.region_index;
        jd["angles"] = nlohmann::ordered_json::array();
        for (double a : d.angles)
            jd["angles"].push_back(detail::angle_json(a));
        j["dummy_layers"].push_back(std::move(jd));
    }
    return j.dump(2) + "\n";
}

inline PhaseRecord record_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "qobf-phase-record")
        throw std::invalid_argument("not a phase record file");
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported phase record version");
    PhaseRecord r;
    if (!parse_hex_u64(j.at("key_fingerprint").get<std::string>(),
                       r.key_fingerprint))
        throw std::invalid_argument("malformed key_fingerprint");
    const std::string q = j.at("quantization").get<std::string>();
    if (q == "eighth_turns")
        r.quantization = Quantization::eighth_turns;
    else if (q == "continuous")
        r.quantization = Quantization::continuous;
    else
        throw std::invalid_argument("unknown quantization '" + q + "'");
    r.dummy_layer_count = j.at("dummy_layer_count").get<int>();
    if (!parse_hex_u64(j.at("dummy_position_seed").get<std::string>(),
                       r.dummy_position_seed))
        throw std::invalid_argument("malformed dummy_position_seed");
    r.qubit_count = j.at("qubit_count").get<int>();
    for (const auto& je : j.at("entries")) {
        PhaseEntry e;
        e.region_index = je.at("region_index").get<int>();
        e.qubit = je.at("qubit").get<int>();
        auto kind = kind_from_name(je.at("original_kind").get<std::string>());
        if (!kind || !is_phase_kind(*kind))
            throw std::invalid_argument("entry kind is not a phase gate");
        e.original_kind = *kind;
        e.original_angle = je.at("original_angle").get<double>();
        r.entries.push_back(e);
    }
    int prev = -1;
    for (const auto& jd : j.at("dummy_layers")) {
        DummyLayer d;
        d.region_index = jd.at("region_index").get<int>();
        if (d.region_index <= prev)
            throw std::invalid_argument(
                "dummy layer indices must strictly increase");
        prev = d.region_index;
        for (const auto& a : jd.at("angles")) d.angles.push_back(a.get<double>());
        r.dummy_layers.push_back(std::move(d));
    }
    return r;
}

}  // namespace qobf
