#ifndef QCSM_GAUGE_H
#define QCSM_GAUGE_H

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcsm/circuit.h"
#include "qcsm/pauli.h"

namespace qcsm {

enum class Flavor { PureX, PureZ, Mixed };

// An ordered set of gauge generators for the spacetime code of a circuit,
// one Ising spin per generator. When built with keep_overcomplete, dependent
// generators are retained and each recorded redundancy (a subset whose
// product is the identity) becomes a local gauge symmetry of the spin model.
struct GaugeBasis {
    Grid grid;
    std::vector<SpacetimePauli> generators;
    std::vector<Flavor> flavor;
    std::vector<std::vector<int>> redundancies;  // generator-index subsets with product I
    int rank = 0;
    bool overcomplete = false;

    bool is_css() const;
};

// Emits the gauge generator candidates of a circuit in deterministic order:
// by timestep, measurement/reset generators before propagators, qubits
// ascending. Pieces at tau < 0.5 or tau > T-0.5 are truncated away.
std::vector<SpacetimePauli> build_gauge_generators(const Circuit &circuit);

// Symplectic GF(2) Gaussian elimination over the candidate list. Keeps the
// earliest independent candidates; every discarded candidate's expression in
// retained ones is recorded as a redundancy. With keep_overcomplete the full
// candidate list is retained (redundancies included) instead of gauge-fixing.
GaugeBasis reduce_to_basis(const std::vector<SpacetimePauli> &candidates,
                           bool keep_overcomplete = false);

GaugeBasis compile_gauge_basis(const Circuit &circuit, bool keep_overcomplete = false);

// Recorded redundancy relations, i.e. spin subsets whose simultaneous flip
// leaves every interaction product invariant. Empty for a reduced basis.
// The returned basis of the relation space prefers low-weight elements
// supported on small spacetime windows (detector cells come out local).
std::vector<std::vector<int>> find_gauge_symmetries(const GaugeBasis &basis);

// Given a basis of a GF(2) relation space over `bits` coordinates, each
// coordinate carrying a spacetime extent [min,max] in (layer, qubit), returns
// an equivalent basis preferring minimum-weight elements that fit small
// sliding windows. Used for gauge symmetries of both raw bases and compiled
// spin models.
std::vector<std::vector<uint64_t>> localize_relation_basis(
    const std::vector<std::vector<uint64_t>> &kernel,
    const std::vector<std::array<int, 4>> &spans,  // {layer_lo, layer_hi, qubit_lo, qubit_hi}
    int bits);

// Basis of the center of the gauge group (elements commuting with every
// generator). Spacetime stabilizers, detector cells included, live here.
std::vector<SpacetimePauli> center_basis(const std::vector<SpacetimePauli> &generators);

// True iff p lies in the group generated by `generators`.
bool in_gauge_span(const std::vector<SpacetimePauli> &generators, const SpacetimePauli &p);

// Structure checks plus observable checks: a declared representative must
// not be a gauge element (trivial class) and must commute with the center
// of the gauge group (undetectable, i.e. trivial syndrome). Dressed
// representatives that anticommute with non-central generators are fine.
std::vector<ValidationIssue> validate_circuit(const Circuit &circuit);

// Image of a single-layer Pauli pushed from its layer to to_layer by
// repeated conjugation, multiplying in measurement generators as needed.
// Returns nullopt and fills `why` if the operator hits an operation it
// cannot be pushed past (anticommuting measurement, any reset).
std::optional<SpacetimePauli> propagate(const SpacetimePauli &p, const Circuit &circuit,
                                        int to_layer, std::string *why = nullptr);

}  // namespace qcsm

#endif
