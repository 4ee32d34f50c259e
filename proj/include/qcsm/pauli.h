#ifndef QCSM_PAULI_H
#define QCSM_PAULI_H

#include <cstdint>
#include <string>
#include <vector>

namespace qcsm {

// Dimensions of the spacetime qubit grid: N circuit qubits by T error
// layers. Errors act at half-integer times tau = layer + 0.5, between the
// integer-time circuit operations.
struct Grid {
    int num_qubits = 0;
    int num_layers = 0;

    int sites() const {
        return num_qubits * num_layers;
    }
    int site(int qubit, int layer) const {
        return layer * num_qubits + qubit;
    }
    bool operator==(const Grid &other) const = default;
};

struct SpacetimeCoord {
    int qubit = 0;
    int layer = 0;  // tau = layer + 0.5

    auto operator<=>(const SpacetimeCoord &) const = default;
};

// Render tau as "layer.5" (e.g. layer 2 -> "2.5").
std::string tau_to_string(int layer);
// Parse "2.5" -> layer 2. Returns false on malformed input.
bool parse_tau(const std::string &text, int *layer_out);

// A Pauli operator modulo phase on the spacetime grid, stored as packed
// X/Z bit planes. A site carries X iff its x bit is set, Z iff its z bit
// is set, and Y iff both are.
struct SpacetimePauli {
    Grid grid;
    std::vector<uint64_t> x_words;
    std::vector<uint64_t> z_words;

    SpacetimePauli() = default;
    explicit SpacetimePauli(Grid g)
        : grid(g), x_words((g.sites() + 63) / 64, 0), z_words((g.sites() + 63) / 64, 0) {}

    bool x_bit(int qubit, int layer) const {
        int s = grid.site(qubit, layer);
        return (x_words[s >> 6] >> (s & 63)) & 1;
    }
    bool z_bit(int qubit, int layer) const {
        int s = grid.site(qubit, layer);
        return (z_words[s >> 6] >> (s & 63)) & 1;
    }
    void set_x(int qubit, int layer, bool v = true);
    void set_z(int qubit, int layer, bool v = true);
    // 0=I, 1=X, 2=Z, 3=Y at a site.
    int pauli_at(int qubit, int layer) const {
        return (x_bit(qubit, layer) ? 1 : 0) + (z_bit(qubit, layer) ? 2 : 0);
    }
    void set_pauli(int qubit, int layer, char p);

    bool is_identity() const;
    size_t weight() const;  // number of non-identity sites

    bool operator==(const SpacetimePauli &other) const = default;
};

// (-1)^(symplectic form): +1 if a and b commute, -1 if they anticommute.
int scalar_commutator(const SpacetimePauli &a, const SpacetimePauli &b);

// Phase-free product: bitwise XOR of the two bit planes.
SpacetimePauli multiply(const SpacetimePauli &a, const SpacetimePauli &b);
void multiply_inplace(SpacetimePauli &a, const SpacetimePauli &b);

// Coordinates of all non-identity sites, sorted by (layer, qubit).
std::vector<SpacetimeCoord> support(const SpacetimePauli &a);

// Builds a Pauli from "P q@tau" tokens, e.g. {"X","3@2.5"} pairs flattened.
SpacetimePauli pauli_from_tokens(Grid grid, const std::vector<std::string> &tokens);
// Token rendering, e.g. "X 3@2.5 Z 0@0.5"; empty operator renders as "I".
std::string pauli_to_tokens(const SpacetimePauli &a);

}  // namespace qcsm

#endif
