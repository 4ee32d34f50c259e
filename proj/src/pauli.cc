#include "qcsm/pauli.h"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace qcsm {

std::string tau_to_string(int layer) {
    return std::to_string(layer) + ".5";
}

bool parse_tau(const std::string &text, int *layer_out) {
    auto dot = text.find('.');
    if (dot == std::string::npos || text.substr(dot) != ".5") {
        return false;
    }
    try {
        size_t used = 0;
        int v = std::stoi(text.substr(0, dot), &used);
        if (used != dot) {
            return false;
        }
        *layer_out = v;
    } catch (const std::exception &) {
        return false;
    }
    return true;
}

void SpacetimePauli::set_x(int qubit, int layer, bool v) {
    int s = grid.site(qubit, layer);
    uint64_t mask = uint64_t{1} << (s & 63);
    if (v) {
        x_words[s >> 6] |= mask;
    } else {
        x_words[s >> 6] &= ~mask;
    }
}

void SpacetimePauli::set_z(int qubit, int layer, bool v) {
    int s = grid.site(qubit, layer);
    uint64_t mask = uint64_t{1} << (s & 63);
    if (v) {
        z_words[s >> 6] |= mask;
    } else {
        z_words[s >> 6] &= ~mask;
    }
}

void SpacetimePauli::set_pauli(int qubit, int layer, char p) {
    switch (p) {
        case 'I':
            set_x(qubit, layer, false);
            set_z(qubit, layer, false);
            break;
        case 'X':
            set_x(qubit, layer, true);
            set_z(qubit, layer, false);
            break;
        case 'Z':
            set_x(qubit, layer, false);
            set_z(qubit, layer, true);
            break;
        case 'Y':
            set_x(qubit, layer, true);
            set_z(qubit, layer, true);
            break;
        default:
            throw std::invalid_argument(std::string("unknown Pauli label: ") + p);
    }
}

bool SpacetimePauli::is_identity() const {
    for (uint64_t w : x_words) {
        if (w) {
            return false;
        }
    }
    for (uint64_t w : z_words) {
        if (w) {
            return false;
        }
    }
    return true;
}

size_t SpacetimePauli::weight() const {
    size_t n = 0;
    for (size_t i = 0; i < x_words.size(); i++) {
        n += std::popcount(x_words[i] | z_words[i]);
    }
    return n;
}

int scalar_commutator(const SpacetimePauli &a, const SpacetimePauli &b) {
    if (a.grid != b.grid) {
        throw std::invalid_argument("scalar_commutator: operands on different grids");
    }
    uint64_t parity = 0;
    for (size_t i = 0; i < a.x_words.size(); i++) {
        parity ^= static_cast<uint64_t>(std::popcount(a.x_words[i] & b.z_words[i]) ^
                                        std::popcount(a.z_words[i] & b.x_words[i]));
    }
    return (parity & 1) ? -1 : +1;
}

SpacetimePauli multiply(const SpacetimePauli &a, const SpacetimePauli &b) {
    SpacetimePauli out = a;
    multiply_inplace(out, b);
    return out;
}

void multiply_inplace(SpacetimePauli &a, const SpacetimePauli &b) {
    if (a.grid != b.grid) {
        throw std::invalid_argument("multiply: operands on different grids");
    }
    for (size_t i = 0; i < a.x_words.size(); i++) {
        a.x_words[i] ^= b.x_words[i];
        a.z_words[i] ^= b.z_words[i];
    }
}

std::vector<SpacetimeCoord> support(const SpacetimePauli &a) {
    std::vector<SpacetimeCoord> out;
    for (int layer = 0; layer < a.grid.num_layers; layer++) {
        for (int qubit = 0; qubit < a.grid.num_qubits; qubit++) {
            if (a.pauli_at(qubit, layer) != 0) {
                out.push_back({qubit, layer});
            }
        }
    }
    return out;
}

SpacetimePauli pauli_from_tokens(Grid grid, const std::vector<std::string> &tokens) {
    if (tokens.size() % 2 != 0) {
        throw std::invalid_argument("pauli tokens must come in 'P q@tau' pairs");
    }
    SpacetimePauli out(grid);
    for (size_t i = 0; i < tokens.size(); i += 2) {
        const std::string &p = tokens[i];
        const std::string &loc = tokens[i + 1];
        if (p.size() != 1 || (p[0] != 'X' && p[0] != 'Y' && p[0] != 'Z')) {
            throw std::invalid_argument("bad Pauli token: " + p);
        }
        auto at = loc.find('@');
        if (at == std::string::npos) {
            throw std::invalid_argument("bad location token: " + loc);
        }
        int qubit = -1, layer = -1;
        try {
            qubit = std::stoi(loc.substr(0, at));
        } catch (const std::exception &) {
            throw std::invalid_argument("bad qubit in token: " + loc);
        }
        if (!parse_tau(loc.substr(at + 1), &layer)) {
            throw std::invalid_argument("bad tau in token: " + loc);
        }
        if (qubit < 0 || qubit >= grid.num_qubits || layer < 0 || layer >= grid.num_layers) {
            throw std::invalid_argument("coordinate outside grid: " + loc);
        }
        // Composing repeated tokens multiplies, matching operator products.
        int cur = out.pauli_at(qubit, layer);
        int add = p[0] == 'X' ? 1 : (p[0] == 'Z' ? 2 : 3);
        int merged = cur ^ add;
        const char names[4] = {'I', 'X', 'Z', 'Y'};
        out.set_pauli(qubit, layer, names[merged]);
    }
    return out;
}

std::string pauli_to_tokens(const SpacetimePauli &a) {
    std::ostringstream out;
    bool first = true;
    for (const auto &c : support(a)) {
        const char names[4] = {'I', 'X', 'Z', 'Y'};
        if (!first) {
            out << ' ';
        }
        out << names[a.pauli_at(c.qubit, c.layer)] << ' ' << c.qubit << '@' << tau_to_string(c.layer);
        first = false;
    }
    if (first) {
        return "I";
    }
    return out.str();
}

}  // namespace qcsm
