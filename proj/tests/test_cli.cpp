#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qobf/counts.hpp"
#include "qobf/qasm.hpp"
#include "qobf/sim.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path fresh_dir() {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("qobf_cli_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + QOBF_CLI_PATH + "\" " + args +
                            " 2>" + err_file.string();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, got);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (fs::exists(err_file)) r.err = qobf_test::read_text(err_file.string());
    return r;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

const std::string kPhasedBell =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[2];\n"
    "creg c[2];\n"
    "h q[0];\n"
    "s q[0];\n"
    "t q[1];\n"
    "cx q[0],q[1];\n"
    "measure q -> c;\n";

}  // namespace

TEST_CASE("usage errors exit with code 2", "[cli]") {
    const auto dir = fresh_dir();
    CHECK(run_cli("", dir).exit_code == 2);
    CHECK(run_cli("obfuscate", dir).exit_code == 2);
    CHECK(run_cli("frobnicate in.qasm", dir).exit_code == 2);
    CHECK(run_cli("--help", dir).exit_code == 0);
    const auto help = run_cli("--help", dir);
    CHECK(help.out.find("obfuscate") != std::string::npos);
}

TEST_CASE("a key source is required, exactly one of two forms", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    write_file(in, kPhasedBell);
    const std::string base = "obfuscate " + in.string() + " -o " +
                             (dir / "o.qasm").string() + " --record " +
                             (dir / "r.json").string();
    CHECK(run_cli(base, dir).exit_code == 2);  // no key at all
    CHECK(run_cli(base + " --seed 1 --key-file k.hex", dir).exit_code == 2);
}

TEST_CASE("parse failures exit with code 3 and name the position", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path bad = dir / "bad.qasm";
    write_file(bad, "OPENQASM 2.0;\nqreg q[1];\nu3(1,2,3) q[0];\n");
    const auto r = run_cli("transpile " + bad.string() + " -o " +
                               (dir / "out.qasm").string(),
                           dir);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("missing files exit with code 4 and name the path", "[cli]") {
    const auto dir = fresh_dir();
    const auto r = run_cli("transpile " + (dir / "absent.qasm").string() +
                               " -o " + (dir / "out.qasm").string(),
                           dir);
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("absent.qasm") != std::string::npos);
}

TEST_CASE("the full pipeline round-trips through the binary", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    const fs::path obf = dir / "obf.qasm";
    const fs::path rec = dir / "rec.json";
    const fs::path low = dir / "low.qasm";
    const fs::path out = dir / "out.qasm";
    write_file(in, kPhasedBell);

    const auto r1 = run_cli("obfuscate " + in.string() + " -o " +
                                obf.string() + " --record " + rec.string() +
                                " --seed 5 --dummy-layers 2",
                            dir);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("equiv key bits: 18") != std::string::npos);
    REQUIRE(fs::exists(obf));
    REQUIRE(fs::exists(rec));

    REQUIRE(run_cli("transpile " + obf.string() + " -o " + low.string(), dir)
                .exit_code == 0);

    REQUIRE(run_cli("deobfuscate " + low.string() + " -o " + out.string() +
                        " --record " + rec.string() + " --seed 5",
                    dir)
                .exit_code == 0);

    const auto v = run_cli("verify " + in.string() + " " + out.string(), dir);
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("unitary-equal") != std::string::npos);
}

TEST_CASE("verify distinguishes different circuits", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path a = dir / "a.qasm";
    const fs::path b = dir / "b.qasm";
    write_file(a, "OPENQASM 2.0;\nqreg q[1];\nx q[0];\n");
    write_file(b, "OPENQASM 2.0;\nqreg q[1];\nh q[0];\n");
    const auto r = run_cli("verify " + a.string() + " " + b.string(), dir);
    CHECK(r.exit_code == 5);
    CHECK(r.out.find("NOT equivalent") != std::string::npos);
}

TEST_CASE("a tampered record is refused with the verification code", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    const fs::path obf = dir / "obf.qasm";
    const fs::path rec = dir / "rec.json";
    write_file(in, kPhasedBell);
    REQUIRE(run_cli("obfuscate " + in.string() + " -o " + obf.string() +
                        " --record " + rec.string() +
                        " --seed 5 --dummy-layers 2",
                    dir)
                .exit_code == 0);
    std::string record = qobf_test::read_text(rec.string());
    const std::string needle = "\"dummy_layer_count\": 2";
    const auto pos = record.find(needle);
    REQUIRE(pos != std::string::npos);
    record.replace(pos, needle.size(), "\"dummy_layer_count\": 3");
    write_file(rec, record);
    const auto r = run_cli("deobfuscate " + obf.string() + " -o " +
                               (dir / "out.qasm").string() + " --record " +
                               rec.string() + " --seed 5",
                           dir);
    CHECK(r.exit_code == 5);
}

TEST_CASE("simulate writes deterministic counts", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    write_file(in, kPhasedBell);
    const fs::path c1 = dir / "c1.json";
    const fs::path c2 = dir / "c2.json";
    const std::string flags = " --shots 500 --rng-seed 17";
    REQUIRE(run_cli("simulate " + in.string() + " -o " + c1.string() + flags,
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("simulate " + in.string() + " -o " + c2.string() + flags,
                    dir)
                .exit_code == 0);
    const std::string t1 = qobf_test::read_text(c1.string());
    CHECK(t1 == qobf_test::read_text(c2.string()));
    const auto counts = qobf::counts_from_json(t1);
    CHECK(counts.shots == 500);
    CHECK(counts.bit_width == 2);

    // noisy runs are deterministic too, but differ from noiseless ones
    const fs::path n1 = dir / "n1.json";
    const fs::path n2 = dir / "n2.json";
    const std::string noisy = flags + " --noise-p 0.05 --noise-seed 3";
    REQUIRE(run_cli("simulate " + in.string() + " -o " + n1.string() + noisy,
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("simulate " + in.string() + " -o " + n2.string() + noisy,
                    dir)
                .exit_code == 0);
    CHECK(qobf_test::read_text(n1.string()) ==
          qobf_test::read_text(n2.string()));
    CHECK(qobf_test::read_text(n1.string()) != t1);
}

TEST_CASE("tvd prints zero for identical files", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    write_file(in, kPhasedBell);
    const fs::path c1 = dir / "c1.json";
    REQUIRE(run_cli("simulate " + in.string() + " -o " + c1.string() +
                        " --shots 200 --rng-seed 1",
                    dir)
                .exit_code == 0);
    const auto r = run_cli("tvd " + c1.string() + " " + c1.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(std::stod(r.out) == 0.0);
}

TEST_CASE("zero key bits triggers a warning", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "plain.qasm";
    write_file(in,
               "OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n");
    const auto r = run_cli("obfuscate " + in.string() + " -o " +
                               (dir / "o.qasm").string() + " --record " +
                               (dir / "r.json").string() +
                               " --seed 9 --dummy-layers 0",
                           dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("equiv key bits: 0") != std::string::npos);
    CHECK(r.err.find("zero key bits") != std::string::npos);
}

TEST_CASE("a hex key file behaves exactly like its seed", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    write_file(in, kPhasedBell);
    const fs::path key = dir / "key.hex";
    write_file(key, "2a\n");  // 42

    const std::string by_seed = "obfuscate " + in.string() + " -o " +
                                (dir / "a.qasm").string() + " --record " +
                                (dir / "a.json").string() +
                                " --seed 42 --dummy-layers 1";
    const std::string by_file = "obfuscate " + in.string() + " -o " +
                                (dir / "b.qasm").string() + " --record " +
                                (dir / "b.json").string() + " --key-file " +
                                key.string() + " --dummy-layers 1";
    REQUIRE(run_cli(by_seed, dir).exit_code == 0);
    REQUIRE(run_cli(by_file, dir).exit_code == 0);
    CHECK(qobf_test::read_text((dir / "a.qasm").string()) ==
          qobf_test::read_text((dir / "b.qasm").string()));
    CHECK(qobf_test::read_text((dir / "a.json").string()) ==
          qobf_test::read_text((dir / "b.json").string()));

    write_file(key, "not hex");
    const auto bad = run_cli(by_file, dir);
    CHECK(bad.exit_code == 3);
}

TEST_CASE("bench reports are byte-identical across runs", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path corpus = dir / "corpus";
    fs::create_directories(corpus);
    write_file(corpus / "tiny.qasm", kPhasedBell);

    const std::string flags = " --seed 7 --dummy-layers 2 --shots 300";
    const auto r1 = run_cli("bench --corpus " + corpus.string() + " --out " +
                                (dir / "out1").string() + flags,
                            dir);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("tiny") != std::string::npos);
    const auto r2 = run_cli("bench --corpus " + corpus.string() + " --out " +
                                (dir / "out2").string() + flags,
                            dir);
    REQUIRE(r2.exit_code == 0);
    for (const char* name : {"bench_report.txt", "bench_report.json"}) {
        INFO(name);
        CHECK(qobf_test::read_text((dir / "out1" / name).string()) ==
              qobf_test::read_text((dir / "out2" / name).string()));
    }
}

TEST_CASE("the sx basis alias lowers to rx rotations", "[cli]") {
    const auto dir = fresh_dir();
    const fs::path in = dir / "in.qasm";
    write_file(in, "OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n");
    const fs::path out = dir / "out.qasm";
    const auto r = run_cli("transpile " + in.string() + " -o " + out.string() +
                               " --basis rz,sx,x,cx",
                           dir);
    REQUIRE(r.exit_code == 0);
    const qobf::Circuit lowered =
        qobf::parse_qasm(qobf_test::read_text(out.string()));
    for (const auto& g : lowered.gates)
        CHECK((g.kind == qobf::GateKind::rz || g.kind == qobf::GateKind::rx ||
               g.kind == qobf::GateKind::x || g.kind == qobf::GateKind::cx));

    const auto bad = run_cli("transpile " + in.string() + " -o " +
                                 out.string() + " --basis rz,bogus,cx",
                             dir);
    CHECK(bad.exit_code == 2);
}
