#include "qcsm/spinmodel.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace qcsm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NoiseChannel NoiseChannel::independent(double px, double pz) {
    if (px < 0 || px > 1 || pz < 0 || pz > 1) {
        throw std::invalid_argument("independent channel needs px, pz in [0,1]");
    }
    NoiseChannel c;
    c.independent_xz = true;
    c.px = px;
    c.pz = pz;
    c.p[0] = (1 - px) * (1 - pz);
    c.p[1] = px * (1 - pz);
    c.p[2] = px * pz;
    c.p[3] = (1 - px) * pz;
    return c;
}

NoiseChannel NoiseChannel::general(double pi, double px, double py, double pz) {
    double sum = pi + px + py + pz;
    if (pi < 0 || px < 0 || py < 0 || pz < 0 || std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("general channel needs nonnegative probabilities summing to 1");
    }
    NoiseChannel c;
    c.independent_xz = false;
    c.p[0] = pi;
    c.p[1] = px;
    c.p[2] = py;
    c.p[3] = pz;
    return c;
}

NishimoriCouplings nishimori_couplings(const NoiseChannel &channel, bool allow_limits) {
    for (int i = 0; i < 4; i++) {
        if (channel.p[i] == 0 && !allow_limits) {
            throw DegenerateChannelError("zero-probability channel entry; request limit handling");
        }
    }
    auto lg = [](double v) { return v == 0 ? -kInf : std::log(v); };
    double li = lg(channel.p[0]), lx = lg(channel.p[1]), ly = lg(channel.p[2]), lz = lg(channel.p[3]);
    NishimoriCouplings k;
    // <<alpha,Q>> = -1 iff alpha and Q are distinct non-identity Paulis.
    k.KI = 0.25 * (li + lx + ly + lz);
    k.KX = 0.25 * (li + lx - ly - lz);
    k.KY = 0.25 * (li - lx + ly - lz);
    k.KZ = 0.25 * (li - lx - ly + lz);
    return k;
}

double effective_probability(int x, int z, double px, double pz) {
    if (x + z < 1) {
        throw std::invalid_argument("effective_probability needs x+z >= 1");
    }
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * px, x) * std::pow(1.0 - 2.0 * pz, z));
}

double coupling_from_probability(double p_eff) {
    if (p_eff == 0) {
        return kInf;
    }
    if (p_eff == 1) {
        return -kInf;
    }
    return 0.5 * std::log((1.0 - p_eff) / p_eff);
}

double effective_coupling(int x, int z, double px, double pz) {
    return coupling_from_probability(effective_probability(x, z, px, pz));
}

std::vector<double> walsh_integrate(const std::vector<double> &couplings) {
    if (couplings.empty()) {
        throw UnsupportedDegreeError("walsh_integrate needs at least one coupling");
    }
    if (couplings.size() == 1) {
        return {};
    }
    if (couplings.size() == 2) {
        double k1 = couplings[0], k2 = couplings[1];
        // ln cosh overflows around 710; use |a| + log1p(exp(-2|a|)) - ln 2.
        auto log_cosh = [](double a) {
            a = std::abs(a);
            return a + std::log1p(std::exp(-2 * a)) - std::log(2.0);
        };
        return {0.5 * (log_cosh(k1 + k2) - log_cosh(k1 - k2))};
    }
    throw UnsupportedDegreeError("integrating a spin with 3 or more interactions is not supported");
}

std::map<std::tuple<char, int, int>, int> SpinModel::location_index() const {
    std::map<std::tuple<char, int, int>, int> out;
    for (size_t c = 0; c < interactions.size(); c++) {
        for (const auto &m : interactions[c].members) {
            char flavor = m.test == 2 ? 'X' : (m.test == 1 ? 'Z' : 'Y');
            out[{flavor, m.qubit, m.layer}] = static_cast<int>(c);
        }
    }
    return out;
}

int SpinModel::count_constant_terms() const {
    int n = 0;
    for (const auto &i : interactions) {
        n += i.is_constant() ? 1 : 0;
    }
    return n;
}

bool SpinModel::has_infinite_coupling() const {
    for (const auto &i : interactions) {
        if (std::isinf(i.coupling)) {
            return true;
        }
    }
    return false;
}

static void fill_weights_from_p(Interaction &ia) {
    ia.coupling = coupling_from_probability(ia.p_eff);
    ia.lw_plus = ia.p_eff == 1 ? -kInf : std::log1p(-ia.p_eff);
    ia.lw_minus = ia.p_eff == 0 ? -kInf : std::log(ia.p_eff);
}

SpinModel build_hamiltonian(const GaugeBasis &basis, const NoiseChannel &channel) {
    SpinModel model;
    model.channel = channel;
    model.independent_xz = channel.independent_xz;
    model.num_spins = static_cast<int>(basis.generators.size());
    model.generator_of_spin.resize(model.num_spins);
    for (int k = 0; k < model.num_spins; k++) {
        model.generator_of_spin[k] = k;
    }
    const Grid grid = basis.grid;

    if (channel.independent_xz) {
        // One interaction per (error flavor, site). Flavor X slots are
        // realized by test Pauli Z and couple spins whose generators carry
        // an X bit at the site (and dually for flavor Z).
        for (int flavor = 0; flavor < 2; flavor++) {
            double p = flavor == 0 ? channel.px : channel.pz;
            for (int layer = 0; layer < grid.num_layers; layer++) {
                for (int q = 0; q < grid.num_qubits; q++) {
                    Interaction ia;
                    ia.members.push_back({static_cast<uint8_t>(flavor == 0 ? 2 : 1), q, layer});
                    ia.wx = flavor == 0 ? 1 : 0;
                    ia.wz = flavor == 0 ? 0 : 1;
                    ia.p_eff = p;
                    fill_weights_from_p(ia);
                    for (int k = 0; k < model.num_spins; k++) {
                        bool hit = flavor == 0 ? basis.generators[k].x_bit(q, layer)
                                               : basis.generators[k].z_bit(q, layer);
                        if (hit) {
                            ia.spins.push_back(k);
                        }
                    }
                    model.interactions.push_back(std::move(ia));
                }
            }
        }
        if (basis.is_css()) {
            model.has_css_split = true;
            model.interaction_side.resize(model.interactions.size());
            for (size_t c = 0; c < model.interactions.size(); c++) {
                model.interaction_side[c] = model.interactions[c].members[0].test == 2 ? 0 : 1;
            }
            model.spin_side.resize(model.num_spins);
            for (int k = 0; k < model.num_spins; k++) {
                model.spin_side[k] = basis.flavor[k] == Flavor::PureZ ? 1 : 0;
            }
        }
    } else {
        NishimoriCouplings K = nishimori_couplings(channel);
        model.log_norm = static_cast<double>(grid.sites()) * K.KI;
        const double k_of[4] = {0, K.KX, K.KZ, K.KY};  // indexed by test code
        for (uint8_t test : {uint8_t{1}, uint8_t{2}, uint8_t{3}}) {
            for (int layer = 0; layer < grid.num_layers; layer++) {
                for (int q = 0; q < grid.num_qubits; q++) {
                    Interaction ia;
                    ia.members.push_back({test, q, layer});
                    ia.coupling = k_of[test];
                    ia.lw_plus = ia.coupling;
                    ia.lw_minus = -ia.coupling;
                    ia.p_eff = std::numeric_limits<double>::quiet_NaN();
                    for (int k = 0; k < model.num_spins; k++) {
                        const auto &g = basis.generators[k];
                        bool anti = false;
                        bool gx = g.x_bit(q, layer), gz = g.z_bit(q, layer);
                        if (test == 1) {
                            anti = gz;
                        } else if (test == 2) {
                            anti = gx;
                        } else {
                            anti = gx ^ gz;
                        }
                        if (anti) {
                            ia.spins.push_back(k);
                        }
                    }
                    model.interactions.push_back(std::move(ia));
                }
            }
        }
    }
    return model;
}

SpinModel simplify(const SpinModel &model) {
    if (!model.independent_xz) {
        throw std::invalid_argument("simplify requires an independent X-Z channel");
    }
    // Working copies; interactions get merged in place, spins get retired.
    std::vector<Interaction> work = model.interactions;
    int n = static_cast<int>(work.size());
    std::vector<bool> dead_interaction(n, false);
    std::vector<bool> dead_spin(model.num_spins, false);
    double extra_log_offset = 0;

    std::vector<std::vector<int>> adj(model.num_spins);
    for (int c = 0; c < n; c++) {
        for (int k : work[c].spins) {
            adj[k].push_back(c);
        }
    }
    // Merges leave stale adjacency entries behind; filter against the live
    // interaction's current spin list and compact in place.
    auto live_interactions_of = [&](int k) {
        std::vector<int> out;
        for (int c : adj[k]) {
            if (!dead_interaction[c] &&
                std::binary_search(work[c].spins.begin(), work[c].spins.end(), k)) {
                out.push_back(c);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        adj[k] = out;
        return out;
    };

    // Two passes keep the outcome canonical: first the vertex deletions and
    // edge contractions of spins that start at degree <= 2 (the connected
    // component step, order independent), then the spins whose degree drops
    // afterwards (boundary and reset-adjacent integrations).
    std::deque<int> queue;
    std::vector<bool> queued(model.num_spins, false);
    std::vector<bool> in_scope(model.num_spins, false);
    auto requeue = [&](int k) {
        if (in_scope[k] && !queued[k] && !dead_spin[k]) {
            queued[k] = true;
            queue.push_back(k);
        }
    };
    auto seed_pass = [&](bool all) {
        for (int k = 0; k < model.num_spins; k++) {
            in_scope[k] = all || adj[k].size() <= 2;
            if (in_scope[k] && !dead_spin[k] && !queued[k]) {
                queued[k] = true;
                queue.push_back(k);
            }
        }
    };
    seed_pass(false);
    bool second_pass = false;

    while (true) {
        if (queue.empty()) {
            if (second_pass) {
                break;
            }
            second_pass = true;
            seed_pass(true);
            if (queue.empty()) {
                break;
            }
        }
        int k = queue.front();
        queue.pop_front();
        queued[k] = false;
        if (dead_spin[k]) {
            continue;
        }
        auto mine = live_interactions_of(k);
        // Constant terms never couple spins, so they are not in adj.
        if (mine.size() == 0) {
            // Free spin: sums to a factor of 2.
            dead_spin[k] = true;
            extra_log_offset += std::log(2.0);
            continue;
        }
        if (mine.size() == 1) {
            // Degree-1 spin: summing it out removes the whole interaction
            // (the weights sum to 1 in probability space).
            int c = mine[0];
            dead_interaction[c] = true;
            dead_spin[k] = true;
            for (int other : work[c].spins) {
                if (other != k) {
                    requeue(other);
                }
            }
            continue;
        }
        if (mine.size() == 2) {
            int a = mine[0], b = mine[1];
            Interaction merged;
            merged.members = work[a].members;
            merged.members.insert(merged.members.end(), work[b].members.begin(), work[b].members.end());
            merged.wx = work[a].wx + work[b].wx;
            merged.wz = work[a].wz + work[b].wz;
            // pi-product rule: the merged slot errs when exactly one side does.
            merged.p_eff = work[a].p_eff * (1 - work[b].p_eff) + work[b].p_eff * (1 - work[a].p_eff);
            fill_weights_from_p(merged);
            // k sits in both lists, so the symmetric difference drops it; any
            // other shared spin cancels by parity as well.
            std::set_symmetric_difference(work[a].spins.begin(), work[a].spins.end(),
                                          work[b].spins.begin(), work[b].spins.end(),
                                          std::back_inserter(merged.spins));
            dead_spin[k] = true;
            dead_interaction[b] = true;
            // Spins whose parity cancelled drop out; all touched spins recheck.
            for (int other : work[a].spins) {
                if (other != k) {
                    requeue(other);
                }
            }
            for (int other : work[b].spins) {
                if (other != k) {
                    requeue(other);
                }
            }
            for (int other : merged.spins) {
                adj[other].push_back(a);
            }
            work[a] = std::move(merged);
            continue;
        }
    }

    // Rebuild with compact spin indexing.
    SpinModel out;
    out.channel = model.channel;
    out.independent_xz = model.independent_xz;
    out.log_norm = model.log_norm;
    out.log_offset = model.log_offset + extra_log_offset;
    std::vector<int> new_index(model.num_spins, -1);
    for (int k = 0; k < model.num_spins; k++) {
        if (!dead_spin[k]) {
            new_index[k] = out.num_spins++;
            out.generator_of_spin.push_back(model.generator_of_spin[k]);
        }
    }
    bool css = model.has_css_split;
    for (int c = 0; c < n; c++) {
        if (dead_interaction[c]) {
            continue;
        }
        Interaction ia = work[c];
        for (int &k : ia.spins) {
            k = new_index[k];
        }
        std::sort(ia.spins.begin(), ia.spins.end());
        std::sort(ia.members.begin(), ia.members.end(), [](const Member &a, const Member &b) {
            return std::tie(a.layer, a.qubit, a.test) < std::tie(b.layer, b.qubit, b.test);
        });
        out.interactions.push_back(std::move(ia));
        if (css) {
            out.interaction_side.push_back(work[c].members[0].test == 2 ? 0 : 1);
        }
    }
    if (css) {
        out.has_css_split = true;
        out.spin_side.resize(out.num_spins);
        for (int k = 0; k < model.num_spins; k++) {
            if (new_index[k] >= 0) {
                out.spin_side[new_index[k]] = model.spin_side[k];
            }
        }
    }
    return out;
}

double energy(const SpinModel &model, const std::vector<int8_t> &eta, const std::vector<int8_t> &sigma) {
    if (eta.size() != model.interactions.size()) {
        throw std::invalid_argument("energy: eta size mismatch");
    }
    if (static_cast<int>(sigma.size()) != model.num_spins) {
        throw std::invalid_argument("energy: sigma size mismatch");
    }
    // Kahan summation; interactions can be numerous on fine grids.
    double sum = 0, comp = 0;
    for (size_t c = 0; c < model.interactions.size(); c++) {
        const auto &ia = model.interactions[c];
        int s = eta[c];
        for (int k : ia.spins) {
            s *= sigma[k];
        }
        if (std::isinf(ia.coupling)) {
            // Hard constraint: violation carries zero weight.
            if ((ia.coupling > 0 && s < 0) || (ia.coupling < 0 && s > 0)) {
                return kInf;
            }
            continue;
        }
        double term = -ia.coupling * s;
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::vector<int> symmetry_spins_in_model(const SpinModel &model, const std::vector<int> &generator_indices) {
    std::vector<int> out;
    for (int k = 0; k < model.num_spins; k++) {
        if (std::binary_search(generator_indices.begin(), generator_indices.end(),
                               model.generator_of_spin[k])) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<std::vector<int>> model_symmetries(const SpinModel &model) {
    const int m = model.num_spins;
    const int words = (m + 63) / 64;
    if (m == 0) {
        return {};
    }
    // Nullspace of the incidence matrix: rows are interactions, columns
    // spins; tag columns with an identity to read combinations back off.
    std::vector<std::vector<uint64_t>> rows;
    for (const auto &ia : model.interactions) {
        if (ia.is_constant()) {
            continue;
        }
        std::vector<uint64_t> r(words, 0);
        for (int k : ia.spins) {
            r[k >> 6] |= uint64_t{1} << (k & 63);
        }
        rows.push_back(std::move(r));
    }
    // Column elimination: find a basis of vectors v with (row . v) = 0.
    std::vector<std::vector<uint64_t>> basis_vec;  // candidate kernel vectors
    std::vector<int> pivot_of_row;
    std::vector<std::vector<uint64_t>> reduced_rows;
    std::vector<bool> is_pivot(m, false);
    for (auto r : rows) {
        for (size_t i = 0; i < reduced_rows.size(); i++) {
            int p = pivot_of_row[i];
            if ((r[p >> 6] >> (p & 63)) & 1) {
                for (int w = 0; w < words; w++) {
                    r[w] ^= reduced_rows[i][w];
                }
            }
        }
        int p = -1;
        for (int w = 0; w < words && p < 0; w++) {
            if (r[w]) {
                p = w * 64 + std::countr_zero(r[w]);
            }
        }
        if (p < 0) {
            continue;
        }
        is_pivot[p] = true;
        pivot_of_row.push_back(p);
        reduced_rows.push_back(std::move(r));
    }
    // Back-substitute so each reduced row has exactly one pivot column set
    // among pivots.
    for (size_t i = 0; i < reduced_rows.size(); i++) {
        for (size_t j = 0; j < reduced_rows.size(); j++) {
            if (i == j) {
                continue;
            }
            int p = pivot_of_row[j];
            if ((reduced_rows[i][p >> 6] >> (p & 63)) & 1) {
                for (int w = 0; w < words; w++) {
                    reduced_rows[i][w] ^= reduced_rows[j][w];
                }
            }
        }
    }
    // Free columns generate the kernel.
    for (int free_col = 0; free_col < m; free_col++) {
        if (is_pivot[free_col]) {
            continue;
        }
        std::vector<uint64_t> v(words, 0);
        v[free_col >> 6] |= uint64_t{1} << (free_col & 63);
        for (size_t i = 0; i < reduced_rows.size(); i++) {
            if ((reduced_rows[i][free_col >> 6] >> (free_col & 63)) & 1) {
                int p = pivot_of_row[i];
                v[p >> 6] ^= uint64_t{1} << (p & 63);
            }
        }
        basis_vec.push_back(std::move(v));
    }
    if (basis_vec.empty()) {
        return {};
    }

    // Spacetime extent of each spin from its interactions' members.
    std::vector<std::array<int, 4>> spans(m, {1 << 30, -1, 1 << 30, -1});
    for (const auto &ia : model.interactions) {
        for (int k : ia.spins) {
            for (const auto &mb : ia.members) {
                spans[k][0] = std::min(spans[k][0], mb.layer);
                spans[k][1] = std::max(spans[k][1], mb.layer);
                spans[k][2] = std::min(spans[k][2], mb.qubit);
                spans[k][3] = std::max(spans[k][3], mb.qubit);
            }
        }
    }
    auto local = localize_relation_basis(basis_vec, spans, m);
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

}  // namespace qcsm
