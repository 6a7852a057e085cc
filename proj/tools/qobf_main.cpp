// qobf: phase-lock quantum circuits before handing them to an untrusted
// compiler, and restore them afterwards.
//
// Exit codes: 0 success, 2 usage, 3 parse/validation, 4 io,
//             5 verification (fingerprint, barrier structure, equivalence).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qobf/bench.hpp"
#include "qobf/counts.hpp"
#include "qobf/metrics.hpp"
#include "qobf/obfuscate.hpp"
#include "qobf/qasm.hpp"
#include "qobf/sim.hpp"
#include "qobf/transpile.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;
constexpr int kExitVerify = 5;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& what)
        : std::runtime_error(what), code(c) {}
};

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_or_die(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(kExitIo, "cannot write '" + path + "'");
    out << text;
    if (!out) throw CliError(kExitIo, "short write on '" + path + "'");
}

qobf::Circuit parse_or_die(const std::string& path) {
    try {
        return qobf::parse_qasm(read_file_or_die(path));
    } catch (const qobf::QasmError& e) {
        throw CliError(kExitParse, path + ": " + e.what());
    }
}

struct KeyFlags {
    std::optional<std::uint64_t> seed;
    std::string key_file;
    std::string quantization = "eighth_turns";
    int dummy_layers = 4;
    std::optional<std::uint64_t> dummy_position_seed;

    // full=true exposes the configuration flags; deobfuscation takes its
    // configuration from the record, so it only accepts the secret itself.
    void attach(CLI::App* cmd, bool full) {
        auto* grp = cmd->add_option_group("key", "secret key source");
        grp->add_option("--seed", seed, "secret key as a 64-bit integer");
        grp->add_option("--key-file", key_file,
                        "file holding the key as up to 16 hex digits");
        grp->require_option(1);
        if (!full) return;
        cmd->add_option("--quantization", quantization,
                        "phase shift set: eighth_turns or continuous")
            ->check(CLI::IsMember({"eighth_turns", "continuous"}));
        cmd->add_option("--dummy-layers", dummy_layers,
                        "full-width dummy phase layers to insert")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--dummy-position-seed", dummy_position_seed,
                        "seed for dummy placement (default: ~seed)");
    }

    qobf::KeySpec resolve() const {
        qobf::KeySpec key;
        if (seed) {
            key.seed = *seed;
        } else {
            std::string text = read_file_or_die(key_file);
            while (!text.empty() &&
                   (text.back() == '\n' || text.back() == '\r' ||
                    text.back() == ' '))
                text.pop_back();
            if (!qobf::parse_hex_u64(text, key.seed))
                throw CliError(kExitParse,
                               "key file must hold up to 16 hex digits");
        }
        key.quantization = quantization == "continuous"
                               ? qobf::Quantization::continuous
                               : qobf::Quantization::eighth_turns;
        key.dummy_layer_count = dummy_layers;
        key.dummy_position_seed =
            dummy_position_seed ? *dummy_position_seed : ~key.seed;
        return key;
    }
};

qobf::Basis parse_basis(const std::string& spec) {
    qobf::Basis basis;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "sx") {  // accepted alias; realized as rx rotations
            basis.insert(qobf::GateKind::rx);
            continue;
        }
        auto kind = qobf::kind_from_name(item);
        if (!kind)
            throw CliError(kExitUsage, "unknown basis gate '" + item + "'");
        basis.insert(*kind);
    }
    return basis;
}

int run(int argc, char** argv) {
    CLI::App app{"phase obfuscation toolchain for OpenQASM circuits"};
    app.require_subcommand(1);

    // obfuscate
    auto* obf_cmd = app.add_subcommand(
        "obfuscate", "lock a circuit's phases and write the sidecar record");
    std::string obf_in, obf_out, obf_record;
    KeyFlags obf_key;
    obf_cmd->add_option("input", obf_in, "input .qasm")->required();
    obf_cmd->add_option("-o,--output", obf_out, "obfuscated .qasm")->required();
    obf_cmd->add_option("--record", obf_record, "phase record .json")
        ->required();
    obf_key.attach(obf_cmd, true);

    // deobfuscate
    auto* deobf_cmd = app.add_subcommand(
        "deobfuscate", "restore a circuit from its record and key");
    std::string de_in, de_out, de_record;
    KeyFlags de_key;
    deobf_cmd->add_option("input", de_in, "compiled obfuscated .qasm")
        ->required();
    deobf_cmd->add_option("-o,--output", de_out, "restored .qasm")->required();
    deobf_cmd->add_option("--record", de_record, "phase record .json")
        ->required();
    de_key.attach(deobf_cmd, false);

    // transpile
    auto* trans_cmd = app.add_subcommand(
        "transpile", "lower to a basis set, honoring barriers");
    std::string tr_in, tr_out, tr_basis = "rz,rx,x,cx";
    trans_cmd->add_option("input", tr_in, "input .qasm")->required();
    trans_cmd->add_option("-o,--output", tr_out, "lowered .qasm")->required();
    trans_cmd->add_option("--basis", tr_basis,
                          "comma-separated gate names (sx = rx alias)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "sample measurement counts");
    std::string sim_in, sim_out;
    std::uint64_t sim_shots = 1000, sim_rng = 1, sim_noise_seed = 2;
    double sim_noise_p = 0.0;
    sim_cmd->add_option("input", sim_in, "input .qasm")->required();
    sim_cmd->add_option("-o,--output", sim_out,
                        "counts .json (stdout when omitted)");
    sim_cmd->add_option("--shots", sim_shots, "shot count")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--rng-seed", sim_rng, "sampling seed");
    sim_cmd->add_option("--noise-p", sim_noise_p,
                        "per-gate Pauli injection probability");
    sim_cmd->add_option("--noise-seed", sim_noise_seed, "noise stream seed");

    // tvd
    auto* tvd_cmd = app.add_subcommand(
        "tvd", "total variation distance between two counts files");
    std::string tvd_a, tvd_b;
    tvd_cmd->add_option("a", tvd_a, "counts .json")->required();
    tvd_cmd->add_option("b", tvd_b, "counts .json")->required();

    // bench
    auto* bench_cmd = app.add_subcommand(
        "bench", "full pipeline over the bundled corpus, report like the "
                 "reference table");
    qobf::BenchOptions bopt;
    std::string bench_corpus = QOBF_BENCHMARK_DIR;
    std::string bench_out = "bench_out";
    bench_cmd->add_option("--corpus", bench_corpus, "corpus directory");
    bench_cmd->add_option("--out", bench_out, "report output directory");
    bench_cmd->add_option("--seed", bopt.seed, "secret key seed");
    bench_cmd->add_option("--dummy-layers", bopt.dummy_layers,
                          "dummy layers per benchmark")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--dummy-position-seed", bopt.dummy_position_seed,
                          "dummy placement seed (default: ~seed)");
    bench_cmd->add_option("--shots", bopt.shots, "shots per TVD estimate")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--rng-seed", bopt.rng_seed, "sampling seed");
    bench_cmd->add_option("--noise-p", bopt.noise_probability,
                          "per-gate Pauli injection probability");
    bench_cmd->add_option("--noise-seed", bopt.noise_seed, "noise stream seed");

    // verify
    auto* verify_cmd = app.add_subcommand(
        "verify", "check two circuits for unitary equivalence");
    std::string ver_a, ver_b;
    verify_cmd->add_option("a", ver_a, "circuit .qasm")->required();
    verify_cmd->add_option("b", ver_b, "circuit .qasm")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (obf_cmd->parsed()) {
        const qobf::Circuit input = parse_or_die(obf_in);
        const qobf::KeySpec key = obf_key.resolve();
        auto [circuit, record] = qobf::obfuscate(input, key);
        write_file_or_die(obf_out, qobf::emit_qasm(circuit));
        write_file_or_die(obf_record, qobf::record_to_json(record));
        const std::size_t bits = qobf::key_bits(record);
        std::cout << "equiv key bits: " << bits << "\n";
        if (bits == 0)
            std::cerr << "warning: no phase gates and no dummy layers; the "
                         "output carries zero key bits\n";
        return 0;
    }
    if (deobf_cmd->parsed()) {
        const qobf::Circuit input = parse_or_die(de_in);
        const qobf::PhaseRecord record =
            qobf::record_from_json(read_file_or_die(de_record));
        qobf::KeySpec key = de_key.resolve();
        // the record, not the command line, owns the dummy configuration
        key.dummy_layer_count = record.dummy_layer_count;
        key.dummy_position_seed = record.dummy_position_seed;
        key.quantization = record.quantization;
        const qobf::Circuit restored = qobf::deobfuscate(input, record, key);
        write_file_or_die(de_out, qobf::emit_qasm(restored));
        return 0;
    }
    if (trans_cmd->parsed()) {
        const qobf::Circuit input = parse_or_die(tr_in);
        const qobf::Circuit lowered =
            qobf::transpile(input, parse_basis(tr_basis));
        write_file_or_die(tr_out, qobf::emit_qasm(lowered));
        return 0;
    }
    if (sim_cmd->parsed()) {
        const qobf::Circuit input = parse_or_die(sim_in);
        std::optional<qobf::NoiseSpec> noise;
        if (sim_noise_p > 0.0)
            noise = qobf::NoiseSpec{sim_noise_p, sim_noise_seed};
        const auto hist =
            qobf::sample_outcomes(input, sim_shots, sim_rng, noise);
        const auto counts = qobf::counts_from_hist(
            hist, qobf::measure_map(input).bit_width);
        const std::string text = qobf::counts_to_json(counts);
        if (sim_out.empty())
            std::cout << text;
        else
            write_file_or_die(sim_out, text);
        return 0;
    }
    if (tvd_cmd->parsed()) {
        const auto a = qobf::counts_from_json(read_file_or_die(tvd_a));
        const auto b = qobf::counts_from_json(read_file_or_die(tvd_b));
        std::cout << qobf::format_angle(qobf::tvd_counts(a, b)) << "\n";
        return 0;
    }
    if (bench_cmd->parsed()) {
        const qobf::BenchReport rep = qobf::run_bench(bench_corpus, bopt);
        std::filesystem::create_directories(bench_out);
        const std::string text = qobf::bench_report_text(rep);
        write_file_or_die(bench_out + "/bench_report.txt", text);
        write_file_or_die(bench_out + "/bench_report.json",
                          qobf::bench_report_json(rep));
        std::cout << text;
        return 0;
    }
    if (verify_cmd->parsed()) {
        const qobf::Circuit a = parse_or_die(ver_a);
        const qobf::Circuit b = parse_or_die(ver_b);
        const double dist = qobf::global_phase_distance(
            qobf::unitary(qobf::strip_measures(a)),
            qobf::unitary(qobf::strip_measures(b)));
        const bool equal = dist < 1e-9;
        std::cout << (equal ? "unitary-equal" : "NOT equivalent")
                  << " (distance " << qobf::format_angle(dist) << ")\n";
        return equal ? 0 : kExitVerify;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const qobf::QasmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const qobf::ObfError& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code) {
            case qobf::ObfError::Code::fingerprint_mismatch:
            case qobf::ObfError::Code::structure_mismatch:
                return kExitVerify;
            default:
                return kExitParse;
        }
    } catch (const qobf::TranspileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
