#ifndef QCSM_CIRCUIT_H
#define QCSM_CIRCUIT_H

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcsm/pauli.h"

namespace qcsm {

enum class OpKind {
    Reset,
    Measure,
    Unitary,
};

enum class Basis { X, Z };

// Unitary gate names. Idle steps are materialized as explicit I gates so
// that every qubit has exactly one action per timestep.
enum class Gate { I, H, S, CX, CZ, SWAP };

struct Operation {
    OpKind kind = OpKind::Unitary;
    int t = 0;  // integer timestep in [0, T]
    // Reset/Measure: basis + 1 or 2 qubits (2 only for MXX/MZZ).
    Basis basis = Basis::Z;
    Gate gate = Gate::I;
    std::vector<int> qubits;

    bool operator==(const Operation &other) const = default;
};

struct ObservableDecl {
    std::string name;
    SpacetimePauli representative;

    bool operator==(const ObservableDecl &other) const = default;
};

struct Circuit {
    int num_qubits = 0;
    int num_timesteps = 0;  // T: operations run at t = 0..T, errors at T layers
    std::vector<Operation> ops;
    std::vector<ObservableDecl> observables;

    Grid grid() const {
        return Grid{num_qubits, num_timesteps};
    }
    bool operator==(const Circuit &other) const = default;
};

struct ValidationIssue {
    enum Kind {
        OverlappingSupport,
        BadCoordinate,
        UnknownGate,
        BadArity,
        MissingAction,
        OddDuration,      // advisory: odd T with declared observables
        TrivialObservable,
        DetectableObservable,
    } kind;
    bool is_error = true;
    std::string message;
};

// Structural checks only (support disjointness, coordinates, one action per
// qubit per timestep). Observable checks live in gauge.h since they need the
// compiled gauge group.
std::vector<ValidationIssue> validate_structure(const Circuit &circuit);

class ParseError : public std::runtime_error {
   public:
    ParseError(ValidationIssue::Kind kind, int line, const std::string &msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), kind(kind), line(line) {}
    ValidationIssue::Kind kind;
    int line;
};

// Parses the line-oriented circuit format (see README). Idle gaps are filled
// with explicit I operations. Throws ParseError on malformed input.
Circuit parse_circuit(const std::string &text);

// Canonical text form; parse_circuit(render_circuit(c)) == c for valid c.
std::string render_circuit(const Circuit &circuit);

// Built-in circuit family generator. Throws std::invalid_argument for an
// unknown name or bad parameters.
struct BuiltinParams {
    int distance = 3;
    std::optional<int> duration;                // T; default per family
    std::string cnot_schedule = "midpoint";     // rep_cnot: midpoint | every_cell
};
Circuit builtin_circuit(const std::string &name, const BuiltinParams &params);

// Names accepted by builtin_circuit.
std::vector<std::string> builtin_names();

}  // namespace qcsm

#endif
