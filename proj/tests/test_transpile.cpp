#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "qobf/obfuscate.hpp"
#include "qobf/qasm.hpp"
#include "qobf/sim.hpp"
#include "qobf/transpile.hpp"
#include "test_util.hpp"

using namespace qobf;

namespace {

constexpr double kPi = std::numbers::pi;

Circuit single(GateKind k, int qubits, std::vector<int> on,
               std::vector<double> params = {}) {
    Circuit c = make_circuit(qubits, {});
    c.gates.push_back(make_gate(k, std::move(on), std::move(params)));
    return c;
}

bool all_in_basis(const Circuit& c, const Basis& b) {
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::barrier || g.kind == GateKind::measure)
            continue;
        if (!b.count(g.kind)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("every gate kind lowers correctly into the default basis",
          "[transpile]") {
    struct Case {
        GateKind kind;
        int qubits;
        std::vector<int> on;
        std::vector<double> params;
    };
    const std::vector<Case> cases = {
        {GateKind::h, 1, {0}, {}},        {GateKind::x, 1, {0}, {}},
        {GateKind::y, 1, {0}, {}},        {GateKind::z, 1, {0}, {}},
        {GateKind::s, 1, {0}, {}},        {GateKind::sdg, 1, {0}, {}},
        {GateKind::t, 1, {0}, {}},        {GateKind::tdg, 1, {0}, {}},
        {GateKind::rz, 1, {0}, {0.3}},    {GateKind::rx, 1, {0}, {0.7}},
        {GateKind::ry, 1, {0}, {1.1}},    {GateKind::p, 1, {0}, {0.4}},
        {GateKind::cx, 2, {0, 1}, {}},    {GateKind::cz, 2, {0, 1}, {}},
        {GateKind::swap, 2, {0, 1}, {}},  {GateKind::ccx, 3, {0, 1, 2}, {}},
    };
    for (const auto& tc : cases) {
        INFO(kind_name(tc.kind));
        const Circuit before = single(tc.kind, tc.qubits, tc.on, tc.params);
        const Circuit after = transpile(before);
        CHECK(all_in_basis(after, default_basis()));
        CHECK(unitary_equivalent(before, after));
    }
}

TEST_CASE("alternate bases work through the same rules", "[transpile]") {
    const Basis alt{GateKind::p, GateKind::h, GateKind::cz};
    for (const auto& tc : std::vector<std::pair<GateKind, std::vector<int>>>{
             {GateKind::x, {0}},
             {GateKind::y, {0}},
             {GateKind::cx, {0, 1}},
             {GateKind::swap, {0, 1}},
             {GateKind::ccx, {0, 1, 2}}}) {
        INFO(kind_name(tc.first));
        const Circuit before =
            single(tc.first, static_cast<int>(tc.second.size()), tc.second);
        const Circuit after = transpile(before, alt);
        CHECK(all_in_basis(after, alt));
        CHECK(unitary_equivalent(before, after));
    }
    // ry needs rx which is absent; it goes through h/phase rewrites
    const Circuit ry = single(GateKind::ry, 1, {0}, {0.9});
    const Circuit after = transpile(ry, alt);
    CHECK(all_in_basis(after, alt));
    CHECK(unitary_equivalent(ry, after));
}

TEST_CASE("a basis without a required class is rejected", "[transpile]") {
    const Circuit c = single(GateKind::h, 1, {0});
    CHECK_THROWS_AS(transpile(c, Basis{GateKind::rz, GateKind::cx}),
                    TranspileError);
    CHECK_THROWS_AS(transpile(c, Basis{GateKind::rx, GateKind::h, GateKind::cx}),
                    TranspileError);
    CHECK_THROWS_AS(transpile(c, Basis{GateKind::rz, GateKind::rx}),
                    TranspileError);
}

TEST_CASE("pure-phase regions pass through with angles untouched",
          "[transpile]") {
    Circuit c = make_circuit(2, {});
    GateApp barrier;
    barrier.kind = GateKind::barrier;
    barrier.qubits = {0, 1};
    c.gates.push_back(barrier);
    c.gates.push_back(make_gate(GateKind::s, {0}));
    c.gates.push_back(make_gate(GateKind::rz, {1}, {0.25}));
    c.gates.push_back(barrier);
    c.gates.push_back(make_gate(GateKind::p, {0}, {1e-17}));
    c.gates.push_back(barrier);

    const Circuit out = transpile(c);
    REQUIRE(out.gates.size() == 6);
    CHECK(out.gates[0].kind == GateKind::barrier);
    CHECK(out.gates[1].kind == GateKind::rz);
    CHECK(out.gates[1].params[0] == kPi / 2);  // s renamed, angle exact
    CHECK(out.gates[2].kind == GateKind::rz);
    CHECK(out.gates[2].params[0] == 0.25);
    CHECK(out.gates[3].kind == GateKind::barrier);
    CHECK(out.gates[4].kind == GateKind::rz);
    CHECK(out.gates[4].params[0] == 1e-17);  // tiny angles are not "optimized"
    CHECK(out.gates[5].kind == GateKind::barrier);
}

TEST_CASE("barriers keep their positions and count", "[transpile]") {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\n"
        "h q[0];\nbarrier;\nt q[0];\nbarrier;\ncx q[0],q[1];\n");
    const Circuit out = transpile(c);
    int barriers = 0;
    for (const auto& g : out.gates)
        if (g.kind == GateKind::barrier) ++barriers;
    CHECK(barriers == 2);
    CHECK(split_regions(out).size() == split_regions(c).size());
    CHECK(unitary_equivalent(c, out));
}

TEST_CASE("adjacent involutions cancel", "[transpile]") {
    const Circuit xs = parse_qasm(
        "OPENQASM 2.0;\nqreg q[1];\nx q[0];\nx q[0];\n");
    CHECK(transpile(xs).gates.empty());

    const Circuit cxs = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];\ncx q[0],q[1];\n");
    CHECK(transpile(cxs).gates.empty());

    // reversed operands are a different gate; nothing cancels
    const Circuit rev = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];\ncx q[1],q[0];\n");
    CHECK_FALSE(transpile(rev).gates.empty());
}

TEST_CASE("rotation fusion adds angles and removes exact zeros",
          "[transpile]") {
    // the x on the other qubit keeps the region from the pure-phase path
    const Circuit fuse = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\nrz(0.3) q[0];\nrz(0.4) q[0];\nx q[1];\n");
    const Circuit fused = transpile(fuse);
    bool found = false;
    for (const auto& g : fused.gates)
        if (g.kind == GateKind::rz) {
            CHECK(g.params[0] == 0.3 + 0.4);
            found = true;
        }
    CHECK(found);

    const Circuit cancel = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\nrz(0.5) q[0];\nrz(-0.5) q[0];\nx q[1];\n");
    const Circuit out = transpile(cancel);
    for (const auto& g : out.gates) CHECK(g.kind != GateKind::rz);
}

TEST_CASE("fusion skips across gates on disjoint qubits only", "[transpile]") {
    // rx q0, x q1, rx q0: the x does not block fusion
    const Circuit c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\nrx(0.2) q[0];\nx q[1];\nrx(0.3) q[0];\n");
    const Circuit out = transpile(c);
    int rx_count = 0;
    for (const auto& g : out.gates)
        if (g.kind == GateKind::rx) {
            ++rx_count;
            CHECK(g.params[0] == 0.2 + 0.3);
        }
    CHECK(rx_count == 1);

    // an intervening gate on the same qubit blocks fusion
    const Circuit blocked = parse_qasm(
        "OPENQASM 2.0;\nqreg q[1];\nrx(0.2) q[0];\nx q[0];\nrx(0.3) q[0];\n");
    const Circuit out2 = transpile(blocked);
    CHECK(unitary_equivalent(blocked, out2));
    int rx2 = 0;
    for (const auto& g : out2.gates)
        if (g.kind == GateKind::rx) ++rx2;
    CHECK(rx2 >= 2);
}

TEST_CASE("peephole output stays unitary-equivalent on random circuits",
          "[transpile]") {
    SplitMix64 rng(404);
    const std::vector<GateKind> kinds = {
        GateKind::h,  GateKind::x,   GateKind::y,  GateKind::z,
        GateKind::s,  GateKind::t,   GateKind::rz, GateKind::rx,
        GateKind::ry, GateKind::p,   GateKind::cx, GateKind::cz,
        GateKind::swap, GateKind::ccx};
    for (int trial = 0; trial < 25; ++trial) {
        const Circuit c =
            qobf_test::random_circuit(rng, 4, 30, kinds, false);
        const Circuit out = transpile(c);
        INFO("trial " << trial);
        CHECK(all_in_basis(out, default_basis()));
        CHECK(unitary_equivalent(c, out));
    }
}

TEST_CASE("measures survive lowering untouched", "[transpile]") {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\n"
        "h q[0];\ncx q[0],q[1];\nmeasure q -> c;\n");
    const Circuit out = transpile(c);
    int measures = 0;
    for (const auto& g : out.gates)
        if (g.kind == GateKind::measure) ++measures;
    CHECK(measures == 2);
    CHECK(out.gates.back().kind == GateKind::measure);
}

TEST_CASE("the full corpus lowers and stays equivalent", "[transpile]") {
    for (const auto& name : qobf_test::reference_corpus()) {
        INFO(name);
        const Circuit c = qobf_test::load_benchmark(name);
        const Circuit out = transpile(c);
        CHECK(all_in_basis(out, default_basis()));
        CHECK(unitary_equivalent(c, out));
    }
}

TEST_CASE("obfuscated circuits keep locked angles through lowering",
          "[transpile]") {
    const Circuit input = qobf_test::load_benchmark("fredkin_n3.qasm");
    KeySpec key;
    key.seed = 90;
    key.dummy_layer_count = 3;
    key.dummy_position_seed = ~key.seed;
    const auto [obf, record] = obfuscate(input, key);
    const Circuit compiled = transpile(obf);
    // every locked angle appears verbatim in the compiled circuit
    const auto before = split_regions(obf);
    const auto after = split_regions(compiled);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (!region_is_pure_phase(before[i])) continue;
        REQUIRE(after[i].gates.size() == before[i].gates.size());
        for (std::size_t k = 0; k < before[i].gates.size(); ++k)
            CHECK(after[i].gates[k].params[0] == before[i].gates[k].params[0]);
    }
}
