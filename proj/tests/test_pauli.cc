#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcsm/pauli.h"
#include "qcsm/rng.h"

using namespace qcsm;

namespace {

SpacetimePauli random_pauli(Grid grid, Rng &rng) {
    SpacetimePauli p(grid);
    for (int layer = 0; layer < grid.num_layers; layer++) {
        for (int q = 0; q < grid.num_qubits; q++) {
            const char names[4] = {'I', 'X', 'Z', 'Y'};
            p.set_pauli(q, layer, names[rng.below(4)]);
        }
    }
    return p;
}

}  // namespace

TEST_CASE("single-site commutators") {
    Grid g{2, 1};
    SpacetimePauli x0(g), z0(g), z1(g);
    x0.set_x(0, 0, true);
    z0.set_z(0, 0, true);
    z1.set_z(1, 0, true);
    CHECK(scalar_commutator(x0, z0) == -1);
    CHECK(scalar_commutator(x0, z1) == +1);

    // XZ on two sites vs ZX on the same sites: two anticommuting pairs cancel.
    SpacetimePauli xz(g), zx(g);
    xz.set_x(0, 0, true);
    xz.set_z(1, 0, true);
    zx.set_z(0, 0, true);
    zx.set_x(1, 0, true);
    CHECK(scalar_commutator(xz, zx) == +1);
}

TEST_CASE("multiplication is xor of bit planes") {
    Grid g{1, 1};
    SpacetimePauli x(g), z(g), i(g);
    x.set_x(0, 0, true);
    z.set_z(0, 0, true);
    CHECK(multiply(x, x) == i);
    SpacetimePauli y = multiply(x, z);
    CHECK(y.pauli_at(0, 0) == 3);
    CHECK(multiply(y, i) == y);
}

TEST_CASE("support lists non-identity coordinates") {
    Grid g{4, 4};
    SpacetimePauli p(g);
    CHECK(support(p).empty());
    p.set_pauli(3, 2, 'Y');
    auto s = support(p);
    REQUIRE(s.size() == 1);
    CHECK(s[0].qubit == 3);
    CHECK(s[0].layer == 2);

    SpacetimePauli xx(g);
    xx.set_x(0, 0, true);
    xx.set_x(1, 0, true);
    CHECK(support(xx).size() == 2);
}

TEST_CASE("grid mismatch is rejected") {
    SpacetimePauli a(Grid{2, 2}), b(Grid{2, 3});
    CHECK_THROWS_AS(scalar_commutator(a, b), std::invalid_argument);
    CHECK_THROWS_AS(multiply(a, b), std::invalid_argument);
}

TEST_CASE("commutator symmetry and bilinearity") {
    Grid g{3, 3};
    Rng rng(17);
    for (int trial = 0; trial < 200; trial++) {
        SpacetimePauli a = random_pauli(g, rng);
        SpacetimePauli b = random_pauli(g, rng);
        SpacetimePauli c = random_pauli(g, rng);
        CHECK(scalar_commutator(a, b) == scalar_commutator(b, a));
        CHECK(scalar_commutator(a, multiply(b, c)) ==
              scalar_commutator(a, b) * scalar_commutator(a, c));
        CHECK(multiply(a, a).is_identity());
        CHECK(multiply(a, b) == multiply(b, a));
    }
}

TEST_CASE("token format round trip") {
    Grid g{5, 4};
    SpacetimePauli p(g);
    p.set_pauli(3, 2, 'X');
    p.set_pauli(0, 0, 'Z');
    p.set_pauli(4, 3, 'Y');
    std::string text = pauli_to_tokens(p);
    CHECK(text == "Z 0@0.5 X 3@2.5 Y 4@3.5");

    std::vector<std::string> toks;
    std::istringstream in(text);
    std::string w;
    while (in >> w) {
        toks.push_back(w);
    }
    CHECK(pauli_from_tokens(g, toks) == p);

    SpacetimePauli id(g);
    CHECK(pauli_to_tokens(id) == "I");
}

TEST_CASE("bad tokens are rejected") {
    Grid g{2, 2};
    CHECK_THROWS_AS(pauli_from_tokens(g, {"X", "5@0.5"}), std::invalid_argument);
    CHECK_THROWS_AS(pauli_from_tokens(g, {"X", "0@9.5"}), std::invalid_argument);
    CHECK_THROWS_AS(pauli_from_tokens(g, {"Q", "0@0.5"}), std::invalid_argument);
    CHECK_THROWS_AS(pauli_from_tokens(g, {"X", "0@1.0"}), std::invalid_argument);
}
