#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qobf {

// Fixed rendering used everywhere an angle reaches text: 17 significant
// digits round-trip any double exactly.
inline std::string format_angle(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class GateKind : std::uint8_t {
    h, x, y, z, s, sdg, t, tdg,
    rz, rx, ry, p,
    cx, cz, swap, ccx,
    barrier, measure,
};

constexpr std::size_t kGateKindCount = 18;

struct GateKindInfo {
    std::string_view name;
    int qubit_arity;   // -1: variable (barrier)
    int param_arity;
};

constexpr std::array<GateKindInfo, kGateKindCount> kGateKindInfo{{
    {"h", 1, 0},   {"x", 1, 0},   {"y", 1, 0},    {"z", 1, 0},
    {"s", 1, 0},   {"sdg", 1, 0}, {"t", 1, 0},    {"tdg", 1, 0},
    {"rz", 1, 1},  {"rx", 1, 1},  {"ry", 1, 1},   {"p", 1, 1},
    {"cx", 2, 0},  {"cz", 2, 0},  {"swap", 2, 0}, {"ccx", 3, 0},
    {"barrier", -1, 0}, {"measure", 1, 0},
}};

inline const GateKindInfo& info(GateKind k) {
    return kGateKindInfo[static_cast<std::size_t>(k)];
}

inline std::string_view kind_name(GateKind k) { return info(k).name; }

inline std::optional<GateKind> kind_from_name(std::string_view name) {
    if (name == "u1") return GateKind::p;  // legacy spelling of the phase gate
    for (std::size_t i = 0; i < kGateKindCount; ++i)
        if (kGateKindInfo[i].name == name) return static_cast<GateKind>(i);
    return std::nullopt;
}

// Diagonal single-qubit rotations whose angle the key schedule may shift.
// z and cz are deliberately not included: the layering pass treats them as
// ordinary non-phase gates.
inline bool is_phase_kind(GateKind k) {
    switch (k) {
        case GateKind::rz: case GateKind::p: case GateKind::s:
        case GateKind::sdg: case GateKind::t: case GateKind::tdg:
            return true;
        default:
            return false;
    }
}

// Angle of the equivalent p gate for fixed-angle phase kinds; rz/p report
// their own parameter.
inline double canonical_phase_angle(GateKind k, const std::vector<double>& params) {
    constexpr double kPi = 3.141592653589793238462643383279502884;
    switch (k) {
        case GateKind::s:   return kPi / 2;
        case GateKind::sdg: return -kPi / 2;
        case GateKind::t:   return kPi / 4;
        case GateKind::tdg: return -kPi / 4;
        case GateKind::rz:
        case GateKind::p:
            return params.at(0);
        default:
            throw std::logic_error("canonical_phase_angle: not a phase kind");
    }
}

struct GateApp {
    GateKind kind{};
    std::vector<int> qubits;
    std::vector<double> params;
    // Destination classical bit for measure; -1 otherwise.
    int cbit = -1;

    bool operator==(const GateApp& o) const = default;
};

inline GateApp make_gate(GateKind k, std::vector<int> qubits,
                         std::vector<double> params = {}) {
    return GateApp{k, std::move(qubits), std::move(params), -1};
}

}  // namespace qobf
