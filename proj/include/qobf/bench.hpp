#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qobf/metrics.hpp"
#include "qobf/qasm.hpp"
#include "qobf/transpile.hpp"

namespace qobf {

// Published characteristics of the bundled corpus, kept for side-by-side
// comparison in reports. TVD references were taken on noisy hardware-model
// simulations, so only their ordering is expected to transfer.
struct BenchmarkRef {
    const char* name;
    int qubits;
    int depth_orig;
    int depth_obf;
    int phase_gates_orig;
    int dummy_gates;
    int key_bits;
    double tvd_obf;
    double tvd_deobf;
    double tvd_orig;
    double tvd_loss;
};

inline const std::array<BenchmarkRef, 5>& reference_table() {
    static const std::array<BenchmarkRef, 5> table{{
        {"adder_n4", 4, 12, 17, 9, 16, 75, 0.50, 0.21, 0.15, 0.06},
        {"basis_trotter_n4", 4, 815, 1088, 492, 16, 1524, 0.19, 0.12, 0.09,
         0.03},
        {"fredkin_n3", 3, 12, 19, 7, 12, 57, 0.66, 0.35, 0.27, 0.08},
        {"basis_change_n3", 3, 22, 27, 0, 12, 36, 0.49, 0.24, 0.19, 0.05},
        {"wstate_n3", 3, 6, 11, 0, 12, 36, 0.67, 0.40, 0.31, 0.09},
    }};
    return table;
}

struct BenchOptions {
    std::uint64_t seed = 7;
    std::optional<std::uint64_t> dummy_position_seed;  // default: ~seed
    int dummy_layers = 4;
    Quantization quantization = Quantization::eighth_turns;
    std::uint64_t shots = 1000;
    std::uint64_t rng_seed = 11;
    double noise_probability = 0.01;
    std::uint64_t noise_seed = 13;
};

struct BenchRow {
    std::string name;
    int qubits = 0;
    TvdReport report;
    const BenchmarkRef* ref = nullptr;  // null for non-bundled circuits
};

struct BenchReport {
    BenchOptions options;
    std::vector<BenchRow> rows;
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline KeySpec bench_key(const BenchOptions& opt) {
    KeySpec key;
    key.seed = opt.seed;
    key.quantization = opt.quantization;
    key.dummy_layer_count = opt.dummy_layers;
    key.dummy_position_seed =
        opt.dummy_position_seed ? *opt.dummy_position_seed : ~opt.seed;
    return key;
}

// Corpus files in reference-table order first, then any extras by name, so
// reports line up row for row with the reference.
inline std::vector<std::filesystem::path> corpus_files(
    const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> found;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".qasm")
            found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    std::vector<std::filesystem::path> ordered;
    for (const auto& ref : reference_table())
        for (const auto& p : found)
            if (p.stem() == ref.name) ordered.push_back(p);
    for (const auto& p : found)
        if (std::find(ordered.begin(), ordered.end(), p) == ordered.end())
            ordered.push_back(p);
    return ordered;
}

inline BenchRow bench_one(const std::string& name, const Circuit& original,
                          const BenchOptions& opt) {
    const KeySpec key = bench_key(opt);
    auto [obf, record] = obfuscate(original, key);
    const Circuit compiled = transpile(obf);
    const Circuit restored = deobfuscate(compiled, record, key);

    SimConfig cfg;
    cfg.shots = opt.shots;
    cfg.rng_seed = opt.rng_seed;
    if (opt.noise_probability > 0.0)
        cfg.noise = NoiseSpec{opt.noise_probability, opt.noise_seed};
    BenchRow row;
    row.name = name;
    row.qubits = original.qubit_count;
    row.report = build_report(original, compiled, restored, record, cfg);
    // depth_obf reports the obfuscated structure itself, pre-compilation
    row.report.depth_obf = depth(obf);
    for (const auto& ref : reference_table())
        if (name == ref.name) row.ref = &ref;
    return row;
}

inline BenchReport run_bench(const std::filesystem::path& corpus_dir,
                             const BenchOptions& opt) {
    BenchReport rep;
    rep.options = opt;
    for (const auto& path : corpus_files(corpus_dir)) {
        const Circuit c = parse_qasm(read_text_file(path));
        rep.rows.push_back(bench_one(path.stem().string(), c, opt));
    }
    if (rep.rows.empty())
        throw std::runtime_error("no .qasm files under '" +
                                 corpus_dir.string() + "'");
    return rep;
}

namespace detail {

inline std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::string with_ref(long measured, long ref) {
    std::string s = std::to_string(measured);
    if (ref >= 0) s += "/" + std::to_string(ref);
    return s;
}

}  // namespace detail

// Aligned text table; "measured/reference" pairs where a reference exists.
inline std::string bench_report_text(const BenchReport& rep) {
    std::vector<std::array<std::string, 11>> rows;
    rows.push_back({"name", "qubits", "depth", "depth-obf", "phase-gates",
                    "dummy-gates", "key-bits", "tvd-obf", "tvd-deobf",
                    "tvd-orig", "tvd-loss"});
    for (const auto& row : rep.rows) {
        const auto& r = row.report;
        const BenchmarkRef* ref = row.ref;
        rows.push_back({
            row.name,
            std::to_string(row.qubits),
            detail::with_ref(r.depth_orig, ref ? ref->depth_orig : -1),
            detail::with_ref(r.depth_obf, ref ? ref->depth_obf : -1),
            detail::with_ref(static_cast<long>(r.phase_gates_orig),
                             ref ? ref->phase_gates_orig : -1),
            detail::with_ref(static_cast<long>(r.dummy_gates),
                             ref ? ref->dummy_gates : -1),
            detail::with_ref(static_cast<long>(r.equiv_key_bits),
                             ref ? ref->key_bits : -1),
            detail::fixed3(r.tvd_obf) +
                (ref ? "/" + detail::fixed3(ref->tvd_obf) : ""),
            detail::fixed3(r.tvd_deobf) +
                (ref ? "/" + detail::fixed3(ref->tvd_deobf) : ""),
            detail::fixed3(r.tvd_orig) +
                (ref ? "/" + detail::fixed3(ref->tvd_orig) : ""),
            detail::fixed3(r.tvd_loss) +
                (ref ? "/" + detail::fixed3(ref->tvd_loss) : ""),
        });
    }
    std::array<std::size_t, 11> width{};
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    std::ostringstream out;
    out << "pipeline: obfuscate -> transpile -> deobfuscate; measured/"
           "reference where a reference row exists\n";
    out << "seed " << rep.options.seed << ", dummy layers "
        << rep.options.dummy_layers << ", shots " << rep.options.shots
        << ", noise p " << detail::fixed3(rep.options.noise_probability)
        << "\n\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << row[i];
            if (i + 1 < row.size())
                out << std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << "\n";
    }
    return out.str();
}

inline std::string bench_report_json(const BenchReport& rep) {
    nlohmann::ordered_json j;
    j["format"] = "qobf-bench-report";
    j["version"] = 1;
    j["config"] = {
        {"seed", rep.options.seed},
        {"dummy_position_seed", bench_key(rep.options).dummy_position_seed},
        {"dummy_layers", rep.options.dummy_layers},
        {"quantization", quantization_name(rep.options.quantization)},
        {"shots", rep.options.shots},
        {"rng_seed", rep.options.rng_seed},
        {"noise_probability", rep.options.noise_probability},
        {"noise_seed", rep.options.noise_seed},
    };
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rep.rows) {
        const auto& r = row.report;
        nlohmann::ordered_json jr;
        jr["name"] = row.name;
        jr["qubits"] = row.qubits;
        jr["depth_orig"] = r.depth_orig;
        jr["depth_obf"] = r.depth_obf;
        jr["phase_gates_orig"] = r.phase_gates_orig;
        jr["dummy_gates"] = r.dummy_gates;
        jr["equiv_key_bits"] = r.equiv_key_bits;
        jr["tvd_obf"] = r.tvd_obf;
        jr["tvd_deobf"] = r.tvd_deobf;
        jr["tvd_orig"] = r.tvd_orig;
        jr["tvd_loss"] = r.tvd_loss;
        if (row.ref) {
            jr["reference"] = {
                {"depth_orig", row.ref->depth_orig},
                {"depth_obf", row.ref->depth_obf},
                {"phase_gates_orig", row.ref->phase_gates_orig},
                {"dummy_gates", row.ref->dummy_gates},
                {"key_bits", row.ref->key_bits},
                {"tvd_obf", row.ref->tvd_obf},
                {"tvd_deobf", row.ref->tvd_deobf},
                {"tvd_orig", row.ref->tvd_orig},
                {"tvd_loss", row.ref->tvd_loss},
            };
        }
        j["rows"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

}  // namespace qobf
