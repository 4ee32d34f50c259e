#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcsm/circuit.h"
#include "qcsm/gauge.h"

using namespace qcsm;

TEST_CASE("minimal program parses") {
    Circuit c = parse_circuit("QUBITS 1\nTICK\nM Z 0\n");
    CHECK(c.num_qubits == 1);
    CHECK(c.num_timesteps == 1);
    int measures = 0, idles = 0;
    for (const auto &op : c.ops) {
        if (op.kind == OpKind::Measure) {
            measures++;
            CHECK(op.t == 1);
            CHECK(op.basis == Basis::Z);
        } else {
            idles++;
        }
    }
    CHECK(measures == 1);
    CHECK(idles == 1);  // implicit idle at t=0
}

TEST_CASE("overlapping support in one tick is rejected") {
    try {
        parse_circuit("QUBITS 2\nTICK\nCX 0 1\nCX 1 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.kind == ValidationIssue::OverlappingSupport);
    }
}

TEST_CASE("unknown gate and bad coordinates are rejected") {
    try {
        parse_circuit("QUBITS 1\nFOO 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.kind == ValidationIssue::UnknownGate);
    }
    try {
        parse_circuit("QUBITS 1\nH 3\n");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.kind == ValidationIssue::BadCoordinate);
    }
}

TEST_CASE("comments, two-qubit measurements, observables") {
    Circuit c = parse_circuit(
        "# header comment\n"
        "QUBITS 4\n"
        "R Z 0\nR Z 1\n"
        "TICK\n"
        "M ZZ 0 1  # brickwork\n"
        "M XX 2 3\n"
        "TICK\n"
        "OBS L X 0@0.5 X 1@0.5\n");
    CHECK(c.num_timesteps == 2);
    REQUIRE(c.observables.size() == 1);
    CHECK(c.observables[0].name == "L");
    CHECK(c.observables[0].representative.x_bit(0, 0));
    CHECK(c.observables[0].representative.x_bit(1, 0));
}

TEST_CASE("odd duration with observables is advisory only") {
    Circuit c = parse_circuit("QUBITS 1\nTICK\nM Z 0\nOBS L X 0@0.5\n");
    bool saw_odd = false;
    for (const auto &issue : validate_structure(c)) {
        if (issue.kind == ValidationIssue::OddDuration) {
            saw_odd = true;
            CHECK_FALSE(issue.is_error);
        } else {
            CHECK_FALSE(issue.is_error);
        }
    }
    CHECK(saw_odd);
}

TEST_CASE("builtins render and parse back unchanged") {
    for (const std::string &name : builtin_names()) {
        BuiltinParams params;
        params.distance = name.rfind("toric", 0) == 0 ? 2 : 3;
        Circuit c = builtin_circuit(name, params);
        CAPTURE(name);
        Circuit reparsed = parse_circuit(render_circuit(c));
        CHECK(reparsed == c);
        for (const auto &issue : validate_structure(c)) {
            CAPTURE(issue.message);
            CHECK_FALSE(issue.is_error);
        }
    }
}

TEST_CASE("builtin conventions") {
    Circuit mem = builtin_circuit("rep_memory", {7, 5, "midpoint"});
    CHECK(mem.num_qubits == 7);
    CHECK(mem.num_timesteps == 5);
    int resets_at_0 = 0, measures_at_5 = 0, mzz = 0;
    for (const auto &op : mem.ops) {
        if (op.kind == OpKind::Reset && op.t == 0 && op.basis == Basis::Z) {
            resets_at_0++;
        }
        if (op.kind == OpKind::Measure && op.t == 5 && op.basis == Basis::Z) {
            measures_at_5++;
        }
        if (op.kind == OpKind::Measure && op.qubits.size() == 2) {
            CHECK(op.basis == Basis::Z);
            mzz++;
        }
    }
    CHECK(resets_at_0 == 7);
    CHECK(measures_at_5 == 7);
    CHECK(mzz == 4 * 3);  // brickwork rounds t=1..4 alternate 3-pair layers

    Circuit st = builtin_circuit("rep_standard", {4, std::nullopt, "midpoint"});
    CHECK(st.num_qubits == 2 * 4 - 1);
    CHECK(st.num_timesteps == 4 * 4 - 1);

    Circuit tor = builtin_circuit("toric_standard", {4, std::nullopt, "midpoint"});
    CHECK(tor.num_qubits == 2 * 4 * 4);

    CHECK_THROWS_AS(builtin_circuit("nope", {}), std::invalid_argument);
    CHECK_THROWS_AS(builtin_circuit("toric_standard", {3, std::nullopt, "midpoint"}),
                    std::invalid_argument);
}

TEST_CASE("declared observables are validated against the compiled code") {
    // The memory logical passes; an X on a single bulk site trips a detector
    // cell and is rejected with the offending stabilizer named.
    Circuit good = builtin_circuit("rep_memory", {3, std::nullopt, "midpoint"});
    for (const auto &issue : validate_circuit(good)) {
        CAPTURE(issue.message);
        CHECK_FALSE(issue.is_error);
    }

    // An X just after the reset flips the first-round detector cell; it
    // anticommutes with the central generator [ZZ] there and is rejected
    // with the offending generator named.
    Circuit bad = good;
    SpacetimePauli detectable(bad.grid());
    detectable.set_x(0, 0, true);
    bad.observables.push_back({"BAD", detectable});
    bool rejected = false;
    for (const auto &issue : validate_circuit(bad)) {
        if (issue.kind == ValidationIssue::DetectableObservable) {
            rejected = true;
            CHECK(issue.message.find("BAD") != std::string::npos);
            CHECK(issue.message.find("Z 0@0.5 Z 1@0.5") != std::string::npos);
        }
    }
    CHECK(rejected);

    // A gauge element is a trivial class.
    Circuit trivial = good;
    SpacetimePauli z0(trivial.grid());
    z0.set_z(0, 0, true);
    trivial.observables.push_back({"TRIV", z0});
    bool flagged = false;
    for (const auto &issue : validate_circuit(trivial)) {
        flagged |= issue.kind == ValidationIssue::TrivialObservable;
    }
    CHECK(flagged);
}
