#include "qcsm/gauge.h"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <stdexcept>

namespace qcsm {

namespace {

// Packed symplectic vector (x plane || z plane) with a combination tag
// tracking which retained candidates produced it.
struct EchelonRow {
    std::vector<uint64_t> v;
    std::vector<int> combo;
    int pivot;
};

std::vector<uint64_t> pack(const SpacetimePauli &p) {
    std::vector<uint64_t> v;
    v.reserve(p.x_words.size() + p.z_words.size());
    v.insert(v.end(), p.x_words.begin(), p.x_words.end());
    v.insert(v.end(), p.z_words.begin(), p.z_words.end());
    return v;
}

int lowest_bit(const std::vector<uint64_t> &v) {
    for (size_t i = 0; i < v.size(); i++) {
        if (v[i]) {
            return static_cast<int>(i * 64 + std::countr_zero(v[i]));
        }
    }
    return -1;
}

void xor_into(std::vector<uint64_t> &a, const std::vector<uint64_t> &b) {
    for (size_t i = 0; i < a.size(); i++) {
        a[i] ^= b[i];
    }
}

void xor_combo(std::vector<int> &a, const std::vector<int> &b) {
    // Symmetric difference of sorted index lists.
    std::vector<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a = std::move(out);
}

// Incremental echelon structure over GF(2).
struct Eliminator {
    std::map<int, EchelonRow> rows_by_pivot;

    // Reduces v in place; combo collects the retained-candidate indices used.
    void reduce(std::vector<uint64_t> &v, std::vector<int> *combo) const {
        while (true) {
            int p = lowest_bit(v);
            if (p < 0) {
                return;
            }
            auto it = rows_by_pivot.find(p);
            if (it == rows_by_pivot.end()) {
                return;
            }
            xor_into(v, it->second.v);
            if (combo) {
                xor_combo(*combo, it->second.combo);
            }
        }
    }

    void insert(std::vector<uint64_t> v, std::vector<int> combo) {
        int p = lowest_bit(v);
        rows_by_pivot.emplace(p, EchelonRow{std::move(v), std::move(combo), p});
    }
};

Flavor flavor_of(const SpacetimePauli &p) {
    bool has_x = false, has_z = false;
    for (uint64_t w : p.x_words) {
        has_x |= w != 0;
    }
    for (uint64_t w : p.z_words) {
        has_z |= w != 0;
    }
    if (has_x && has_z) {
        return Flavor::Mixed;
    }
    return has_z ? Flavor::PureZ : Flavor::PureX;
}

// Conjugation of a single layer's (x,z) bits by the unitaries at timestep t.
// All maps are phase-free symplectic updates.
void conjugate_layer(std::vector<char> &x, std::vector<char> &z, const Circuit &circuit, int t) {
    for (const auto &op : circuit.ops) {
        if (op.t != t || op.kind != OpKind::Unitary) {
            continue;
        }
        switch (op.gate) {
            case Gate::I:
                break;
            case Gate::H: {
                int q = op.qubits[0];
                std::swap(x[q], z[q]);
                break;
            }
            case Gate::S: {
                int q = op.qubits[0];
                z[q] ^= x[q];
                break;
            }
            case Gate::CX: {
                int c = op.qubits[0], g = op.qubits[1];
                x[g] ^= x[c];
                z[c] ^= z[g];
                break;
            }
            case Gate::CZ: {
                int c = op.qubits[0], g = op.qubits[1];
                z[c] ^= x[g];
                z[g] ^= x[c];
                break;
            }
            case Gate::SWAP: {
                int c = op.qubits[0], g = op.qubits[1];
                std::swap(x[c], x[g]);
                std::swap(z[c], z[g]);
                break;
            }
        }
    }
}

}  // namespace

bool GaugeBasis::is_css() const {
    for (Flavor f : flavor) {
        if (f == Flavor::Mixed) {
            return false;
        }
    }
    return true;
}

std::vector<SpacetimePauli> build_gauge_generators(const Circuit &circuit) {
    const Grid grid = circuit.grid();
    const int T = circuit.num_timesteps;
    std::vector<SpacetimePauli> out;

    for (int t = 0; t <= T; t++) {
        std::vector<const Operation *> measures, resets, unitaries;
        for (const auto &op : circuit.ops) {
            if (op.t != t) {
                continue;
            }
            if (op.kind == OpKind::Measure) {
                measures.push_back(&op);
            } else if (op.kind == OpKind::Reset) {
                resets.push_back(&op);
            } else {
                unitaries.push_back(&op);
            }
        }

        // Measurement generators [M] on both adjacent layers (where they exist).
        for (const auto *m : measures) {
            for (int layer : {t - 1, t}) {
                if (layer < 0 || layer >= T) {
                    continue;
                }
                SpacetimePauli g(grid);
                for (int q : m->qubits) {
                    g.set_pauli(q, layer, m->basis == Basis::X ? 'X' : 'Z');
                }
                out.push_back(std::move(g));
            }
        }
        // Resets stabilize only the post-reset layer.
        for (const auto *r : resets) {
            int layer = t;
            if (layer >= T) {
                continue;
            }
            SpacetimePauli g(grid);
            g.set_pauli(r->qubits[0], layer, r->basis == Basis::X ? 'X' : 'Z');
            out.push_back(std::move(g));
        }

        // Propagators: for unmeasured qubits, X and Z pushed through the
        // timestep's unitaries; for two-qubit measurements, a generating set
        // of the commuting Paulis on their support.
        std::vector<char> seed_owner(circuit.num_qubits, 0);  // 0 none, 1 unitary, 2 meas2
        for (const auto *u : unitaries) {
            for (int q : u->qubits) {
                seed_owner[q] = 1;
            }
        }
        std::vector<const Operation *> meas2_by_min(circuit.num_qubits, nullptr);
        for (const auto *m : measures) {
            if (m->qubits.size() == 2) {
                int q0 = std::min(m->qubits[0], m->qubits[1]);
                meas2_by_min[q0] = m;
                seed_owner[m->qubits[0]] = std::max(seed_owner[m->qubits[0]], char(2));
                seed_owner[m->qubits[1]] = std::max(seed_owner[m->qubits[1]], char(2));
            }
        }

        auto emit_propagator = [&](const std::vector<std::pair<int, char>> &pre_sites) {
            // pre_sites: (qubit, pauli) at layer t-1; image at layer t is the
            // conjugate under the timestep's unitaries (identity on measured
            // qubits, which pre_sites never touch for unitary seeds).
            SpacetimePauli g(grid);
            bool any = false;
            if (t - 1 >= 0) {
                for (auto [q, p] : pre_sites) {
                    g.set_pauli(q, t - 1, p);
                }
                any = true;
            }
            if (t <= T - 1) {
                std::vector<char> x(circuit.num_qubits, 0), z(circuit.num_qubits, 0);
                for (auto [q, p] : pre_sites) {
                    x[q] = (p == 'X' || p == 'Y');
                    z[q] = (p == 'Z' || p == 'Y');
                }
                conjugate_layer(x, z, circuit, t);
                for (int q = 0; q < circuit.num_qubits; q++) {
                    if (x[q]) {
                        g.set_x(q, t, true);
                    }
                    if (z[q]) {
                        g.set_z(q, t, true);
                    }
                }
                any = true;
            }
            if (any && !g.is_identity()) {
                out.push_back(std::move(g));
            }
        };

        for (int q = 0; q < circuit.num_qubits; q++) {
            if (seed_owner[q] == 1) {
                emit_propagator({{q, 'X'}});
                emit_propagator({{q, 'Z'}});
            } else if (meas2_by_min[q] != nullptr) {
                const Operation *m = meas2_by_min[q];
                int i = m->qubits[0], j = m->qubits[1];
                char same = m->basis == Basis::X ? 'X' : 'Z';
                char dual = m->basis == Basis::X ? 'Z' : 'X';
                // e.g. M_ZZ: Z_i, Z_j and XX all commute with the measurement.
                emit_propagator({{i, same}});
                emit_propagator({{j, same}});
                emit_propagator({{i, dual}, {j, dual}});
            }
        }
    }
    return out;
}

GaugeBasis reduce_to_basis(const std::vector<SpacetimePauli> &candidates, bool keep_overcomplete) {
    GaugeBasis basis;
    if (!candidates.empty()) {
        basis.grid = candidates[0].grid;
    }
    basis.overcomplete = keep_overcomplete;

    Eliminator elim;
    std::vector<int> kept_of_candidate(candidates.size(), -1);
    for (size_t j = 0; j < candidates.size(); j++) {
        if (candidates[j].grid != basis.grid) {
            throw std::invalid_argument("reduce_to_basis: mixed grids");
        }
        std::vector<uint64_t> v = pack(candidates[j]);
        std::vector<int> combo;
        elim.reduce(v, &combo);
        int self_index = keep_overcomplete ? static_cast<int>(j) : static_cast<int>(basis.generators.size());
        if (lowest_bit(v) < 0) {
            // Dependent: the accumulated combo of retained generators
            // multiplies to this candidate; close the relation with it.
            if (keep_overcomplete) {
                std::vector<int> relation = combo;
                relation.push_back(static_cast<int>(j));
                std::sort(relation.begin(), relation.end());
                basis.redundancies.push_back(relation);
                basis.generators.push_back(candidates[j]);
                basis.flavor.push_back(flavor_of(candidates[j]));
            }
            continue;
        }
        // The reduced vector equals the candidate times the rows folded in,
        // so its combination tag is the accumulated combo plus itself.
        xor_combo(combo, {self_index});
        elim.insert(std::move(v), std::move(combo));
        kept_of_candidate[j] = self_index;
        basis.generators.push_back(candidates[j]);
        basis.flavor.push_back(flavor_of(candidates[j]));
        basis.rank++;
    }
    return basis;
}

GaugeBasis compile_gauge_basis(const Circuit &circuit, bool keep_overcomplete) {
    GaugeBasis b = reduce_to_basis(build_gauge_generators(circuit), keep_overcomplete);
    b.grid = circuit.grid();
    return b;
}

std::vector<std::vector<int>> find_gauge_symmetries(const GaugeBasis &basis) {
    if (basis.redundancies.empty()) {
        return {};
    }
    const int m = static_cast<int>(basis.generators.size());
    const int words = (m + 63) / 64;
    std::vector<std::vector<uint64_t>> kernel;
    for (const auto &r : basis.redundancies) {
        std::vector<uint64_t> v(words, 0);
        for (int k : r) {
            v[k >> 6] |= uint64_t{1} << (k & 63);
        }
        kernel.push_back(std::move(v));
    }
    std::vector<std::array<int, 4>> spans(m, {1 << 30, -1, 1 << 30, -1});
    for (int k = 0; k < m; k++) {
        for (const auto &c : support(basis.generators[k])) {
            spans[k][0] = std::min(spans[k][0], c.layer);
            spans[k][1] = std::max(spans[k][1], c.layer);
            spans[k][2] = std::min(spans[k][2], c.qubit);
            spans[k][3] = std::max(spans[k][3], c.qubit);
        }
    }
    auto local = localize_relation_basis(kernel, spans, m);
    std::vector<std::vector<int>> out;
    for (const auto &v : local) {
        std::vector<int> idx;
        for (int k = 0; k < m; k++) {
            if ((v[k >> 6] >> (k & 63)) & 1) {
                idx.push_back(k);
            }
        }
        out.push_back(std::move(idx));
    }
    return out;
}

std::vector<std::vector<uint64_t>> localize_relation_basis(
    const std::vector<std::vector<uint64_t>> &kernel, const std::vector<std::array<int, 4>> &spans,
    int bits) {
    const int words = (bits + 63) / 64;
    int max_layer = 0, max_qubit = 0;
    for (const auto &sp : spans) {
        if (sp[1] >= 0) {
            max_layer = std::max(max_layer, sp[1]);
            max_qubit = std::max(max_qubit, sp[3]);
        }
    }

    std::vector<std::vector<uint64_t>> picked;      // echelonized copies
    std::vector<std::vector<uint64_t>> picked_raw;  // the relations kept
    auto try_pick = [&](const std::vector<uint64_t> &v) {
        std::vector<uint64_t> red = v;
        for (const auto &p : picked) {
            int pb = -1;
            for (int w = 0; w < words && pb < 0; w++) {
                if (p[w]) {
                    pb = w * 64 + std::countr_zero(p[w]);
                }
            }
            if ((red[pb >> 6] >> (pb & 63)) & 1) {
                for (int w = 0; w < words; w++) {
                    red[w] ^= p[w];
                }
            }
        }
        bool zero = true;
        for (int w = 0; w < words; w++) {
            zero &= red[w] == 0;
        }
        if (!zero) {
            picked.push_back(red);
            picked_raw.push_back(v);
        }
    };

    auto restrict_kernel = [&](const std::vector<std::vector<uint64_t>> &space, auto &&inside) {
        std::vector<std::vector<uint64_t>> sub = space;
        for (int k = 0; k < bits && !sub.empty(); k++) {
            if (inside(k)) {
                continue;
            }
            int pivot_row = -1;
            for (size_t r = 0; r < sub.size(); r++) {
                if ((sub[r][k >> 6] >> (k & 63)) & 1) {
                    pivot_row = static_cast<int>(r);
                    break;
                }
            }
            if (pivot_row < 0) {
                continue;
            }
            for (size_t r = 0; r < sub.size(); r++) {
                if (static_cast<int>(r) != pivot_row && ((sub[r][k >> 6] >> (k & 63)) & 1)) {
                    for (int w = 0; w < words; w++) {
                        sub[r][w] ^= sub[pivot_row][w];
                    }
                }
            }
            sub.erase(sub.begin() + pivot_row);
        }
        std::erase_if(sub, [&](const std::vector<uint64_t> &v) {
            for (int w = 0; w < words; w++) {
                if (v[w]) {
                    return false;
                }
            }
            return true;
        });
        return sub;
    };

    // Pool of candidate local relations harvested from every window; the
    // final basis greedily prefers the lightest ones.
    std::set<std::vector<uint64_t>> pool;
    auto harvest = [&](const std::vector<std::vector<uint64_t>> &sub) {
        int dim = static_cast<int>(sub.size());
        if (dim == 0 || dim > 16) {
            return;
        }
        std::vector<uint64_t> acc(words, 0);
        uint32_t gray = 0;
        for (uint32_t i = 1; i < (1u << dim); i++) {
            uint32_t next = i ^ (i >> 1);
            int b = std::countr_zero(gray ^ next);
            for (int w = 0; w < words; w++) {
                acc[w] ^= sub[b][w];
            }
            gray = next;
            pool.insert(acc);
        }
    };

    for (int width = 1; width <= max_layer + 1; width++) {
        for (int start = 0; start + width <= max_layer + 1; start++) {
            auto sub = restrict_kernel(kernel, [&](int k) {
                return spans[k][0] >= start && spans[k][1] < start + width;
            });
            if (sub.empty()) {
                continue;
            }
            if (sub.size() <= 16) {
                harvest(sub);
                continue;
            }
            // Too many space-parallel relations share the window; restrict
            // further to sliding qubit intervals.
            for (int qwidth = 2; qwidth <= max_qubit + 1; qwidth *= 2) {
                for (int qstart = 0; qstart <= max_qubit + 1 - qwidth;
                     qstart += std::max(1, qwidth / 2)) {
                    auto sub2 = restrict_kernel(sub, [&](int k) {
                        return spans[k][2] >= qstart && spans[k][3] < qstart + qwidth;
                    });
                    if (!sub2.empty() && sub2.size() <= 16) {
                        harvest(sub2);
                    }
                }
            }
        }
    }

    std::vector<std::pair<int, std::vector<uint64_t>>> weighted;
    for (const auto &v : pool) {
        int weight = 0;
        for (int w = 0; w < words; w++) {
            weight += std::popcount(v[w]);
        }
        weighted.push_back({weight, v});
    }
    std::sort(weighted.begin(), weighted.end());
    for (const auto &[weight, v] : weighted) {
        if (picked.size() >= kernel.size()) {
            break;
        }
        try_pick(v);
    }
    for (const auto &v : kernel) {
        if (picked.size() >= kernel.size()) {
            break;
        }
        try_pick(v);
    }
    return picked_raw;
}

std::vector<SpacetimePauli> center_basis(const std::vector<SpacetimePauli> &generators) {
    // Independent spanning subset first.
    std::vector<SpacetimePauli> span;
    {
        Eliminator elim;
        for (const auto &g : generators) {
            std::vector<uint64_t> v = pack(g);
            elim.reduce(v, nullptr);
            if (lowest_bit(v) >= 0) {
                elim.insert(std::move(v), {});
                span.push_back(g);
            }
        }
    }
    int r = static_cast<int>(span.size());
    if (r == 0) {
        return {};
    }
    // Gram matrix over GF(2): G[i][j] = 1 iff span[i], span[j] anticommute.
    int words = (r + 63) / 64;
    std::vector<std::vector<uint64_t>> gram(r, std::vector<uint64_t>(words, 0));
    for (int i = 0; i < r; i++) {
        for (int j = 0; j < r; j++) {
            if (scalar_commutator(span[i], span[j]) == -1) {
                gram[i][j >> 6] |= uint64_t{1} << (j & 63);
            }
        }
    }
    // Nullspace of gram: coefficient vectors c with G c = 0. Treat rows of
    // gram as constraints; eliminate with an identity tag matrix.
    std::vector<std::vector<uint64_t>> tag(r, std::vector<uint64_t>(words, 0));
    for (int i = 0; i < r; i++) {
        tag[i][i >> 6] |= uint64_t{1} << (i & 63);
    }
    // Column-style elimination on the transposed system: we row-reduce the
    // matrix whose i-th row is gram-row(i) with tag(i) tracking combinations.
    std::vector<int> pivot_col;
    std::vector<int> row_order;
    std::vector<bool> used(r, false);
    for (int col = 0; col < r; col++) {
        int pr = -1;
        for (int i = 0; i < r; i++) {
            if (!used[i] && ((gram[i][col >> 6] >> (col & 63)) & 1)) {
                pr = i;
                break;
            }
        }
        if (pr < 0) {
            continue;
        }
        used[pr] = true;
        for (int i = 0; i < r; i++) {
            if (i != pr && ((gram[i][col >> 6] >> (col & 63)) & 1)) {
                for (int w = 0; w < words; w++) {
                    gram[i][w] ^= gram[pr][w];
                    tag[i][w] ^= tag[pr][w];
                }
            }
        }
    }
    std::vector<SpacetimePauli> center;
    for (int i = 0; i < r; i++) {
        bool zero = true;
        for (int w = 0; w < words; w++) {
            zero &= gram[i][w] == 0;
        }
        if (!zero) {
            continue;
        }
        // tag row i gives a combination with zero symplectic product against
        // every generator: a center element.
        SpacetimePauli c(span[0].grid);
        bool any = false;
        for (int k = 0; k < r; k++) {
            if ((tag[i][k >> 6] >> (k & 63)) & 1) {
                multiply_inplace(c, span[k]);
                any = true;
            }
        }
        if (any && !c.is_identity()) {
            center.push_back(std::move(c));
        }
    }
    return center;
}

bool in_gauge_span(const std::vector<SpacetimePauli> &generators, const SpacetimePauli &p) {
    Eliminator elim;
    for (const auto &g : generators) {
        std::vector<uint64_t> v = pack(g);
        elim.reduce(v, nullptr);
        if (lowest_bit(v) >= 0) {
            elim.insert(std::move(v), {});
        }
    }
    std::vector<uint64_t> v = pack(p);
    elim.reduce(v, nullptr);
    return lowest_bit(v) < 0;
}

std::vector<ValidationIssue> validate_circuit(const Circuit &circuit) {
    std::vector<ValidationIssue> issues = validate_structure(circuit);
    for (const auto &issue : issues) {
        if (issue.is_error) {
            return issues;  // structure must hold before compiling
        }
    }
    if (circuit.observables.empty()) {
        return issues;
    }
    auto gens = build_gauge_generators(circuit);
    // A valid representative may be dressed (anticommute with non-central
    // generators), but anticommuting with a central generator means the
    // declared class differs from the identity class at an inert or
    // detector-pinned location.
    std::vector<const SpacetimePauli *> central;
    for (const auto &g : gens) {
        bool is_central = true;
        for (const auto &h : gens) {
            if (scalar_commutator(g, h) == -1) {
                is_central = false;
                break;
            }
        }
        if (is_central) {
            central.push_back(&g);
        }
    }
    for (const auto &obs : circuit.observables) {
        if (in_gauge_span(gens, obs.representative)) {
            issues.push_back({ValidationIssue::TrivialObservable, true,
                              "observable " + obs.name + " is a gauge element (trivial class)"});
            continue;
        }
        for (const auto *g : central) {
            if (scalar_commutator(obs.representative, *g) == -1) {
                issues.push_back({ValidationIssue::DetectableObservable, true,
                                  "observable " + obs.name + " anticommutes with gauge generator " +
                                      pauli_to_tokens(*g)});
                break;
            }
        }
    }
    return issues;
}

std::optional<SpacetimePauli> propagate(const SpacetimePauli &p, const Circuit &circuit, int to_layer,
                                        std::string *why) {
    auto blocked = [&](const std::string &msg) -> std::optional<SpacetimePauli> {
        if (why) {
            *why = msg;
        }
        return std::nullopt;
    };
    const int T = circuit.num_timesteps;
    if (to_layer < 0 || to_layer >= T) {
        throw std::invalid_argument("propagate: target layer outside grid");
    }
    auto supp = support(p);
    if (supp.empty()) {
        SpacetimePauli out(circuit.grid());
        return out;
    }
    int from_layer = supp[0].layer;
    for (const auto &c : supp) {
        if (c.layer != from_layer) {
            throw std::invalid_argument("propagate: operator must live on a single layer");
        }
    }

    // Current operator as per-qubit bits on the moving layer.
    std::vector<char> x(circuit.num_qubits, 0), z(circuit.num_qubits, 0);
    for (const auto &c : supp) {
        int pl = p.pauli_at(c.qubit, c.layer);
        x[c.qubit] = pl == 1 || pl == 3;
        z[c.qubit] = pl == 2 || pl == 3;
    }

    int layer = from_layer;
    int step = to_layer > from_layer ? 1 : -1;
    while (layer != to_layer) {
        int t = step > 0 ? layer + 1 : layer;  // timestep crossed by this move
        if (step < 0) {
            // Walking backward first undoes the unitaries at t (all gate
            // bit-maps are self-inverse at the phase-free level).
            conjugate_layer(x, z, circuit, t);
        }
        for (const auto &op : circuit.ops) {
            if (op.t != t) {
                continue;
            }
            if (op.kind == OpKind::Reset) {
                int q = op.qubits[0];
                if (step > 0) {
                    if (x[q] || z[q]) {
                        return blocked("support on qubit " + std::to_string(q) + " hits a reset at t=" +
                                       std::to_string(t));
                    }
                } else {
                    // Backward across a reset: the stabilized Pauli is a
                    // single-sided generator and simply clears.
                    bool is_stab = op.basis == Basis::X ? (x[q] && !z[q]) : (z[q] && !x[q]);
                    if (x[q] || z[q]) {
                        if (!is_stab) {
                            return blocked("support on qubit " + std::to_string(q) +
                                           " anticommutes with a reset at t=" + std::to_string(t));
                        }
                        x[q] = z[q] = 0;
                    }
                }
            } else if (op.kind == OpKind::Measure) {
                if (op.qubits.size() == 1) {
                    int q = op.qubits[0];
                    bool anti = op.basis == Basis::X ? z[q] : x[q];
                    if (anti) {
                        return blocked("support on qubit " + std::to_string(q) +
                                       " anticommutes with a measurement at t=" + std::to_string(t));
                    }
                    // The commuting part rides through via the two
                    // measurement generators (bits already in place).
                } else {
                    int i = op.qubits[0], j = op.qubits[1];
                    bool anti = op.basis == Basis::X ? (z[i] ^ z[j]) : (x[i] ^ x[j]);
                    if (anti) {
                        return blocked("support on qubits " + std::to_string(i) + "," + std::to_string(j) +
                                       " anticommutes with a two-qubit measurement at t=" + std::to_string(t));
                    }
                }
            }
        }
        if (step > 0) {
            conjugate_layer(x, z, circuit, t);
        }
        layer += step;
    }

    SpacetimePauli out(circuit.grid());
    for (int q = 0; q < circuit.num_qubits; q++) {
        if (x[q]) {
            out.set_x(q, to_layer, true);
        }
        if (z[q]) {
            out.set_z(q, to_layer, true);
        }
    }
    return out;
}

}  // namespace qcsm
