#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcsm/gauge.h"
#include "qcsm/rng.h"

using namespace qcsm;

namespace {

Circuit circuit_of(const std::string &text) {
    return parse_circuit(text);
}

int count_sites(const SpacetimePauli &p) {
    return static_cast<int>(support(p).size());
}

}  // namespace

TEST_CASE("idle qubit emits X and Z propagators") {
    Circuit c = circuit_of("QUBITS 1\nTICK\nTICK\n");
    auto gens = build_gauge_generators(c);
    // t=0 idle truncates to single-site [X],[Z] at layer 0; t=1 idle spans
    // layers 0-1; t=2 truncates to layer 1.
    REQUIRE(gens.size() == 6);
    CHECK(gens[2].x_bit(0, 0));
    CHECK(gens[2].x_bit(0, 1));
    CHECK(count_sites(gens[2]) == 2);
    CHECK(gens[3].z_bit(0, 0));
    CHECK(gens[3].z_bit(0, 1));
}

TEST_CASE("cnot propagators include the control hook") {
    Circuit c = circuit_of("QUBITS 2\nTICK\nCX 0 1\nTICK\n");
    auto gens = build_gauge_generators(c);
    // Look for [X]_{0,t-0.5} [XX]_{{0,1},t+0.5} from the CX at t=1.
    bool found = false;
    for (const auto &g : gens) {
        if (g.x_bit(0, 0) && g.x_bit(0, 1) && g.x_bit(1, 1) && count_sites(g) == 3 &&
            !g.z_bit(0, 0) && !g.z_bit(0, 1) && !g.z_bit(1, 1)) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("the isolated two-qubit measurement element reduces to four generators") {
    // Candidate set of one bulk M_ZZ: both measurement generators, both
    // single-qubit Z propagators and the XX propagator. One Z propagator is
    // dependent (the product of all four Z-type candidates is the identity).
    Grid g{2, 2};
    SpacetimePauli zz_pre(g), zz_post(g), z0p(g), z1p(g), xxp(g);
    zz_pre.set_z(0, 0, true);
    zz_pre.set_z(1, 0, true);
    zz_post.set_z(0, 1, true);
    zz_post.set_z(1, 1, true);
    z0p.set_z(0, 0, true);
    z0p.set_z(0, 1, true);
    z1p.set_z(1, 0, true);
    z1p.set_z(1, 1, true);
    for (int q : {0, 1}) {
        for (int l : {0, 1}) {
            xxp.set_x(q, l, true);
        }
    }
    std::vector<SpacetimePauli> cands = {zz_pre, zz_post, z0p, z1p, xxp};

    GaugeBasis basis = reduce_to_basis(cands, false);
    CHECK(basis.rank == 4);
    int two_site_z = 0, four_site_x = 0;
    for (size_t k = 0; k < basis.generators.size(); k++) {
        two_site_z += basis.flavor[k] == Flavor::PureZ && count_sites(basis.generators[k]) == 2;
        four_site_x += basis.flavor[k] == Flavor::PureX && count_sites(basis.generators[k]) == 4;
    }
    CHECK(four_site_x == 1);
    CHECK(two_site_z == 3);

    // Kept overcomplete, the discarded propagator closes the 4-subset
    // redundancy g1 g2 g3 g4 = I.
    GaugeBasis over = reduce_to_basis(cands, true);
    CHECK(over.overcomplete);
    CHECK(over.generators.size() == cands.size());
    REQUIRE(over.redundancies.size() == 1);
    CHECK(over.redundancies[0] == std::vector<int>{0, 1, 2, 3});
    SpacetimePauli prod(g);
    for (int k : over.redundancies[0]) {
        multiply_inplace(prod, over.generators[k]);
    }
    CHECK(prod.is_identity());

    // All four Z-type generators kept: one symmetry of 4 spins.
    CHECK(find_gauge_symmetries(basis).empty());
    CHECK(find_gauge_symmetries(over).size() == 1);
}

TEST_CASE("recorded redundancies multiply to the identity on real circuits") {
    for (const std::string name : {"rep_memory", "rep_standard"}) {
        Circuit c = builtin_circuit(name, {3, std::nullopt, "midpoint"});
        auto cands = build_gauge_generators(c);
        GaugeBasis over = reduce_to_basis(cands, true);
        CAPTURE(name);
        CHECK(!over.redundancies.empty());
        for (const auto &r : over.redundancies) {
            SpacetimePauli prod(c.grid());
            for (int k : r) {
                multiply_inplace(prod, over.generators[k]);
            }
            CHECK(prod.is_identity());
        }
        CHECK(over.rank == reduce_to_basis(cands, false).rank);
    }
}

TEST_CASE("independent input set is unchanged") {
    Grid g{2, 1};
    SpacetimePauli a(g), b(g);
    a.set_x(0, 0, true);
    b.set_z(1, 0, true);
    GaugeBasis basis = reduce_to_basis({a, b}, false);
    CHECK(basis.generators.size() == 2);
    CHECK(basis.rank == 2);
    CHECK(basis.redundancies.empty());
}

TEST_CASE("basis reduction is idempotent and rank matches") {
    Circuit c = builtin_circuit("rep_memory", {3, std::nullopt, "midpoint"});
    auto cands = build_gauge_generators(c);
    GaugeBasis b1 = reduce_to_basis(cands, false);
    GaugeBasis b2 = reduce_to_basis(b1.generators, false);
    CHECK(b1.rank == b2.rank);
    CHECK(b2.generators.size() == b1.generators.size());
    CHECK(b1.rank == static_cast<int>(b1.generators.size()));
}

TEST_CASE("builtin observables validate and sit outside the gauge span") {
    for (const std::string name : {"rep_memory", "rep_stability", "rep_standard", "rep_wiggling"}) {
        Circuit c = builtin_circuit(name, {3, std::nullopt, "midpoint"});
        CAPTURE(name);
        for (const auto &issue : validate_circuit(c)) {
            CAPTURE(issue.message);
            CHECK_FALSE(issue.is_error);
        }
        auto gens = build_gauge_generators(c);
        for (const auto &obs : c.observables) {
            CHECK_FALSE(in_gauge_span(gens, obs.representative));
        }
    }
}

TEST_CASE("propagate single steps") {
    // X through CX control picks up the target.
    Circuit c = circuit_of("QUBITS 2\nTICK\nCX 0 1\nTICK\n");
    SpacetimePauli x0(c.grid());
    x0.set_x(0, 0, true);
    auto img = propagate(x0, c, 1);
    REQUIRE(img.has_value());
    CHECK(img->x_bit(0, 1));
    CHECK(img->x_bit(1, 1));
    CHECK(count_sites(*img) == 2);

    // Z through M_Z rides the measurement generators.
    Circuit cm = circuit_of("QUBITS 1\nTICK\nM Z 0\nTICK\n");
    SpacetimePauli z0(cm.grid());
    z0.set_z(0, 0, true);
    auto imgz = propagate(z0, cm, 1);
    REQUIRE(imgz.has_value());
    CHECK(imgz->z_bit(0, 1));
    CHECK(count_sites(*imgz) == 1);

    // X against M_Z is blocked.
    SpacetimePauli xx(cm.grid());
    xx.set_x(0, 0, true);
    std::string why;
    CHECK_FALSE(propagate(xx, cm, 1, &why).has_value());
    CHECK(why.find("anticommutes") != std::string::npos);
}

TEST_CASE("propagate composes like direct conjugation on unitary circuits") {
    Circuit c = circuit_of(
        "QUBITS 3\n"
        "TICK\nCX 0 1\nH 2\n"
        "TICK\nCZ 1 2\nS 0\n"
        "TICK\nSWAP 0 2\n"
        "TICK\nH 0\nCX 1 2\n"
        "TICK\n");
    Rng rng(5);
    for (int trial = 0; trial < 50; trial++) {
        SpacetimePauli p(c.grid());
        for (int q = 0; q < 3; q++) {
            const char names[4] = {'I', 'X', 'Z', 'Y'};
            p.set_pauli(q, 0, names[rng.below(4)]);
        }
        auto direct = propagate(p, c, c.num_timesteps - 1);
        REQUIRE(direct.has_value());
        // Stepwise composition.
        SpacetimePauli cur = p;
        for (int layer = 1; layer < c.num_timesteps; layer++) {
            auto step = propagate(cur, c, layer);
            REQUIRE(step.has_value());
            cur = *step;
        }
        CHECK(cur == *direct);
        // And pulling the image back returns the original.
        auto back = propagate(*direct, c, 0);
        REQUIRE(back.has_value());
        CHECK(*back == p);
    }
}

TEST_CASE("center elements commute with every generator") {
    Circuit c = builtin_circuit("rep_memory", {3, 3, "midpoint"});
    auto gens = build_gauge_generators(c);
    auto center = center_basis(gens);
    CHECK(!center.empty());
    for (const auto &s : center) {
        for (const auto &g : gens) {
            CHECK(scalar_commutator(s, g) == +1);
        }
        CHECK(in_gauge_span(gens, s));
    }
}
