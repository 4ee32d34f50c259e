#include "qcsm/circuit.h"

#include <algorithm>
#include <sstream>

namespace qcsm {

namespace {

int op_arity(Gate g) {
    switch (g) {
        case Gate::I:
        case Gate::H:
        case Gate::S:
            return 1;
        case Gate::CX:
        case Gate::CZ:
        case Gate::SWAP:
            return 2;
    }
    return 1;
}

const char *gate_name(Gate g) {
    switch (g) {
        case Gate::I:
            return "I";
        case Gate::H:
            return "H";
        case Gate::S:
            return "S";
        case Gate::CX:
            return "CX";
        case Gate::CZ:
            return "CZ";
        case Gate::SWAP:
            return "SWAP";
    }
    return "?";
}

int min_qubit(const Operation &op) {
    int m = op.qubits[0];
    for (int q : op.qubits) {
        m = std::min(m, q);
    }
    return m;
}

}  // namespace

// Shared by the parser and the builtin generators: sorts non-idle operations
// within each timestep by their lowest qubit and appends explicit idles for
// untouched qubits, so structurally equal circuits have equal op lists.
static std::vector<Operation> normalize_ops(int num_qubits, int num_timesteps,
                                            std::vector<Operation> ops) {
    std::vector<Operation> out;
    for (int t = 0; t <= num_timesteps; t++) {
        std::vector<Operation> at_t;
        for (const auto &op : ops) {
            if (op.t == t && !(op.kind == OpKind::Unitary && op.gate == Gate::I)) {
                at_t.push_back(op);
            }
        }
        std::sort(at_t.begin(), at_t.end(), [](const Operation &a, const Operation &b) {
            return min_qubit(a) < min_qubit(b);
        });
        std::vector<bool> touched(num_qubits, false);
        for (const auto &op : at_t) {
            for (int q : op.qubits) {
                if (q >= 0 && q < num_qubits) {
                    touched[q] = true;
                }
            }
        }
        for (auto &op : at_t) {
            out.push_back(std::move(op));
        }
        for (int q = 0; q < num_qubits; q++) {
            if (!touched[q]) {
                out.push_back(Operation{OpKind::Unitary, t, Basis::Z, Gate::I, {q}});
            }
        }
    }
    return out;
}

Circuit finalize_circuit(int num_qubits, int num_timesteps, std::vector<Operation> ops,
                         std::vector<ObservableDecl> observables) {
    Circuit c;
    c.num_qubits = num_qubits;
    c.num_timesteps = num_timesteps;
    c.ops = normalize_ops(num_qubits, num_timesteps, std::move(ops));
    c.observables = std::move(observables);
    return c;
}

std::vector<ValidationIssue> validate_structure(const Circuit &circuit) {
    std::vector<ValidationIssue> issues;
    auto fail = [&](ValidationIssue::Kind kind, const std::string &msg) {
        issues.push_back({kind, true, msg});
    };

    std::vector<std::vector<int>> action_count(circuit.num_timesteps + 1,
                                               std::vector<int>(circuit.num_qubits, 0));
    for (const auto &op : circuit.ops) {
        if (op.t < 0 || op.t > circuit.num_timesteps) {
            fail(ValidationIssue::BadCoordinate, "operation at timestep " + std::to_string(op.t) +
                                                     " outside [0," + std::to_string(circuit.num_timesteps) + "]");
            continue;
        }
        if (op.kind == OpKind::Measure) {
            if (op.qubits.size() < 1 || op.qubits.size() > 2) {
                fail(ValidationIssue::BadArity, "measurement arity must be 1 or 2");
            }
        } else if (op.kind == OpKind::Reset) {
            if (op.qubits.size() != 1) {
                fail(ValidationIssue::BadArity, "reset arity must be 1");
            }
        } else {
            if (static_cast<int>(op.qubits.size()) != op_arity(op.gate)) {
                fail(ValidationIssue::BadArity, std::string("gate ") + gate_name(op.gate) + " arity mismatch");
            }
            if (op.qubits.size() == 2 && op.qubits[0] == op.qubits[1]) {
                fail(ValidationIssue::BadCoordinate, "two-qubit gate with repeated qubit");
            }
        }
        for (int q : op.qubits) {
            if (q < 0 || q >= circuit.num_qubits) {
                fail(ValidationIssue::BadCoordinate, "qubit " + std::to_string(q) + " outside [0," +
                                                         std::to_string(circuit.num_qubits) + ")");
            } else {
                action_count[op.t][q]++;
            }
        }
    }
    for (int t = 0; t <= circuit.num_timesteps; t++) {
        for (int q = 0; q < circuit.num_qubits; q++) {
            if (action_count[t][q] > 1) {
                fail(ValidationIssue::OverlappingSupport, "qubit " + std::to_string(q) +
                                                              " has multiple actions at timestep " +
                                                              std::to_string(t));
            } else if (action_count[t][q] == 0) {
                fail(ValidationIssue::MissingAction, "qubit " + std::to_string(q) +
                                                         " has no action at timestep " + std::to_string(t));
            }
        }
    }
    for (const auto &obs : circuit.observables) {
        if (obs.representative.grid != circuit.grid()) {
            fail(ValidationIssue::BadCoordinate, "observable " + obs.name + " declared on a different grid");
        }
    }
    // Odd duration is advisory: the bare-logical pairing argument needs even
    // T, but single-class experiments run fine with odd T.
    if (!circuit.observables.empty() && circuit.num_timesteps % 2 != 0) {
        issues.push_back({ValidationIssue::OddDuration, false,
                          "odd duration T=" + std::to_string(circuit.num_timesteps) +
                              " with declared observables; anticommuting logical pairs need even T"});
    }
    return issues;
}

Circuit parse_circuit(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    int num_qubits = -1;
    int t = 0;
    std::vector<Operation> ops;
    struct ObsLine {
        std::string name;
        std::vector<std::string> tokens;
        int line_no;
    };
    std::vector<ObsLine> obs_lines;

    auto bad = [&](ValidationIssue::Kind kind, const std::string &msg) -> ParseError {
        return ParseError(kind, line_no, msg);
    };

    while (std::getline(in, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string w;
        while (ls >> w) {
            tok.push_back(w);
        }
        if (tok.empty()) {
            continue;
        }
        auto parse_qubit = [&](const std::string &s) {
            int q = -1;
            try {
                size_t used = 0;
                q = std::stoi(s, &used);
                if (used != s.size()) {
                    q = -1;
                }
            } catch (const std::exception &) {
                q = -1;
            }
            if (q < 0 || (num_qubits >= 0 && q >= num_qubits)) {
                throw bad(ValidationIssue::BadCoordinate, "bad qubit '" + s + "'");
            }
            return q;
        };

        const std::string &kw = tok[0];
        if (kw == "QUBITS") {
            if (tok.size() != 2 || num_qubits >= 0) {
                throw bad(ValidationIssue::UnknownGate, "malformed QUBITS header");
            }
            try {
                num_qubits = std::stoi(tok[1]);
            } catch (const std::exception &) {
                num_qubits = -1;
            }
            if (num_qubits <= 0) {
                throw bad(ValidationIssue::BadCoordinate, "qubit count must be positive");
            }
            continue;
        }
        if (num_qubits < 0) {
            throw bad(ValidationIssue::UnknownGate, "QUBITS header must come first");
        }
        if (kw == "TICK") {
            if (tok.size() != 1) {
                throw bad(ValidationIssue::UnknownGate, "TICK takes no arguments");
            }
            t++;
            continue;
        }
        if (kw == "OBS") {
            if (tok.size() < 4 || (tok.size() - 2) % 2 != 0) {
                throw bad(ValidationIssue::UnknownGate, "malformed OBS line");
            }
            obs_lines.push_back({tok[1], std::vector<std::string>(tok.begin() + 2, tok.end()), line_no});
            continue;
        }
        if (kw == "R" || kw == "M") {
            if (tok.size() < 3) {
                throw bad(ValidationIssue::UnknownGate, "malformed " + kw + " line");
            }
            const std::string &basis_s = tok[1];
            Operation op;
            op.kind = kw == "R" ? OpKind::Reset : OpKind::Measure;
            op.t = t;
            if (basis_s == "X" || basis_s == "Z") {
                op.basis = basis_s == "X" ? Basis::X : Basis::Z;
                if (tok.size() != 3) {
                    throw bad(ValidationIssue::UnknownGate, "single-qubit " + kw + " takes one qubit");
                }
                op.qubits = {parse_qubit(tok[2])};
            } else if ((basis_s == "XX" || basis_s == "ZZ") && op.kind == OpKind::Measure) {
                op.basis = basis_s == "XX" ? Basis::X : Basis::Z;
                if (tok.size() != 4) {
                    throw bad(ValidationIssue::UnknownGate, "two-qubit measurement takes two qubits");
                }
                op.qubits = {parse_qubit(tok[2]), parse_qubit(tok[3])};
                if (op.qubits[0] == op.qubits[1]) {
                    throw bad(ValidationIssue::BadCoordinate, "repeated qubit in two-qubit measurement");
                }
            } else {
                throw bad(ValidationIssue::UnknownGate, "unknown basis '" + basis_s + "' for " + kw);
            }
            ops.push_back(op);
            continue;
        }
        Gate g;
        if (kw == "I") {
            g = Gate::I;
        } else if (kw == "H") {
            g = Gate::H;
        } else if (kw == "S") {
            g = Gate::S;
        } else if (kw == "CX") {
            g = Gate::CX;
        } else if (kw == "CZ") {
            g = Gate::CZ;
        } else if (kw == "SWAP") {
            g = Gate::SWAP;
        } else {
            throw bad(ValidationIssue::UnknownGate, "unknown gate '" + kw + "'");
        }
        Operation op;
        op.kind = OpKind::Unitary;
        op.gate = g;
        op.t = t;
        if (static_cast<int>(tok.size()) - 1 != op_arity(g)) {
            throw bad(ValidationIssue::UnknownGate, std::string("gate ") + kw + " takes " +
                                                        std::to_string(op_arity(g)) + " qubit(s)");
        }
        for (size_t i = 1; i < tok.size(); i++) {
            op.qubits.push_back(parse_qubit(tok[i]));
        }
        if (op.qubits.size() == 2 && op.qubits[0] == op.qubits[1]) {
            throw bad(ValidationIssue::BadCoordinate, "repeated qubit in two-qubit gate");
        }
        ops.push_back(op);
        continue;
    }
    if (num_qubits < 0) {
        throw ParseError(ValidationIssue::UnknownGate, 0, "missing QUBITS header");
    }

    int num_timesteps = t;
    Grid grid{num_qubits, num_timesteps};
    std::vector<ObservableDecl> observables;
    for (const auto &ol : obs_lines) {
        line_no = ol.line_no;
        try {
            observables.push_back({ol.name, pauli_from_tokens(grid, ol.tokens)});
        } catch (const std::invalid_argument &e) {
            throw ParseError(ValidationIssue::BadCoordinate, ol.line_no, e.what());
        }
    }

    Circuit c = finalize_circuit(num_qubits, num_timesteps, std::move(ops), std::move(observables));
    // Surface hard structural violations (overlapping support etc.) as errors.
    for (const auto &issue : validate_structure(c)) {
        if (issue.is_error) {
            throw ParseError(issue.kind, 0, issue.message);
        }
    }
    return c;
}

std::string render_circuit(const Circuit &circuit) {
    std::ostringstream out;
    out << "QUBITS " << circuit.num_qubits << "\n";
    for (int t = 0; t <= circuit.num_timesteps; t++) {
        if (t > 0) {
            out << "TICK\n";
        }
        for (const auto &op : circuit.ops) {
            if (op.t != t) {
                continue;
            }
            if (op.kind == OpKind::Reset) {
                out << "R " << (op.basis == Basis::X ? "X" : "Z") << ' ' << op.qubits[0] << "\n";
            } else if (op.kind == OpKind::Measure) {
                if (op.qubits.size() == 1) {
                    out << "M " << (op.basis == Basis::X ? "X" : "Z") << ' ' << op.qubits[0] << "\n";
                } else {
                    out << "M " << (op.basis == Basis::X ? "XX" : "ZZ") << ' ' << op.qubits[0] << ' '
                        << op.qubits[1] << "\n";
                }
            } else if (op.gate != Gate::I) {
                out << gate_name(op.gate);
                for (int q : op.qubits) {
                    out << ' ' << q;
                }
                out << "\n";
            }
        }
    }
    for (const auto &obs : circuit.observables) {
        out << "OBS " << obs.name << ' ' << pauli_to_tokens(obs.representative) << "\n";
    }
    return out.str();
}

}  // namespace qcsm
