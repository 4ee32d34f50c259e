#include "qcsm/oracle.h"

#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace qcsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
struct LogSum {
    double max = -kInf;
    double sum = 0;

    void add(double x) {
        if (x == -kInf) {
            return;
        }
        if (x <= max) {
            sum += std::exp(x - max);
        } else {
            sum = sum * std::exp(max - x) + 1.0;
            max = x;
        }
    }
    double value() const {
        return sum == 0 ? -kInf : max + std::log(sum);
    }
};

}  // namespace

double exact_partition(const SpinModel &model, const std::vector<int8_t> &eta) {
    const int m = model.num_spins;
    if (m > 24) {
        throw TooLargeError("exact_partition: more than 24 spins");
    }
    if (eta.size() != model.interactions.size()) {
        throw std::invalid_argument("exact_partition: eta size mismatch");
    }
    const int n = static_cast<int>(model.interactions.size());

    std::vector<std::vector<int>> adj(m);
    for (int c = 0; c < n; c++) {
        for (int k : model.interactions[c].spins) {
            adj[k].push_back(c);
        }
    }
    // Current sign and per-interaction log-weight; -inf tracked by count so
    // sums stay finite.
    std::vector<int8_t> s(n);
    double finite_sum = 0;
    long zero_count = 0;
    auto lw = [&](int c, int sign) {
        return sign > 0 ? model.interactions[c].lw_plus : model.interactions[c].lw_minus;
    };
    for (int c = 0; c < n; c++) {
        s[c] = eta[c];
        double v = lw(c, s[c]);
        if (v == -kInf) {
            zero_count++;
        } else {
            finite_sum += v;
        }
    }

    LogSum z;
    if (zero_count == 0) {
        z.add(finite_sum);
    }
    const uint64_t total = uint64_t{1} << m;
    for (uint64_t i = 1; i < total; i++) {
        int k = std::countr_zero(i);
        for (int c : adj[k]) {
            double old_v = lw(c, s[c]);
            if (old_v == -kInf) {
                zero_count--;
            } else {
                finite_sum -= old_v;
            }
            s[c] = -s[c];
            double new_v = lw(c, s[c]);
            if (new_v == -kInf) {
                zero_count++;
            } else {
                finite_sum += new_v;
            }
        }
        if (zero_count == 0) {
            z.add(finite_sum);
        }
    }
    return z.value() + model.log_norm + model.log_offset;
}

namespace {

// Greedy independent subset over GF(2) symplectic vectors.
std::vector<SpacetimePauli> independent_subset(const std::vector<SpacetimePauli> &gens) {
    std::vector<SpacetimePauli> rows;   // echelonized copies
    std::vector<SpacetimePauli> kept;   // originals
    for (const auto &g : gens) {
        SpacetimePauli v = g;
        bool zero = false;
        while (true) {
            int pivot = -1;
            for (size_t w = 0; w < v.x_words.size() * 2 && pivot < 0; w++) {
                uint64_t word = w < v.x_words.size() ? v.x_words[w] : v.z_words[w - v.x_words.size()];
                if (word) {
                    pivot = static_cast<int>(w * 64 + std::countr_zero(word));
                }
            }
            if (pivot < 0) {
                zero = true;
                break;
            }
            bool reduced = false;
            for (const auto &r : rows) {
                int rp = -1;
                for (size_t w = 0; w < r.x_words.size() * 2 && rp < 0; w++) {
                    uint64_t word = w < r.x_words.size() ? r.x_words[w] : r.z_words[w - r.x_words.size()];
                    if (word) {
                        rp = static_cast<int>(w * 64 + std::countr_zero(word));
                    }
                }
                if (rp == pivot) {
                    multiply_inplace(v, r);
                    reduced = true;
                    break;
                }
            }
            if (!reduced) {
                break;
            }
        }
        if (!zero && !v.is_identity()) {
            rows.push_back(v);
            kept.push_back(g);
        }
    }
    return kept;
}

}  // namespace

double log_coset_probability(const SpacetimePauli &error, const std::vector<SpacetimePauli> &generators,
                             const NoiseChannel &channel) {
    std::vector<SpacetimePauli> gens = independent_subset(generators);
    const int m = static_cast<int>(gens.size());
    if (m > 24) {
        throw TooLargeError("coset_probability: gauge rank above 24");
    }
    const Grid grid = error.grid;
    const int sites = grid.sites();

    // Per-site Pauli codes of the running coset element (0=I,1=X,2=Z,3=Y).
    std::vector<uint8_t> code(sites);
    auto site_logp = [&](uint8_t cd) {
        // channel.p[] is indexed I,X,Y,Z.
        static const int to_channel[4] = {0, 1, 3, 2};
        double v = channel.p[to_channel[cd]];
        return v == 0 ? -kInf : std::log(v);
    };
    double finite_sum = 0;
    long zero_count = 0;
    for (int layer = 0; layer < grid.num_layers; layer++) {
        for (int q = 0; q < grid.num_qubits; q++) {
            uint8_t cd = static_cast<uint8_t>(error.pauli_at(q, layer));
            code[grid.site(q, layer)] = cd;
            double v = site_logp(cd);
            if (v == -kInf) {
                zero_count++;
            } else {
                finite_sum += v;
            }
        }
    }
    // Generator support lists for incremental updates.
    struct GenSite {
        int site;
        uint8_t cd;
    };
    std::vector<std::vector<GenSite>> gsupp(m);
    for (int k = 0; k < m; k++) {
        for (const auto &c : support(gens[k])) {
            gsupp[k].push_back({grid.site(c.qubit, c.layer),
                                static_cast<uint8_t>(gens[k].pauli_at(c.qubit, c.layer))});
        }
    }

    LogSum z;
    if (zero_count == 0) {
        z.add(finite_sum);
    }
    const uint64_t totalc = uint64_t{1} << m;
    for (uint64_t i = 1; i < totalc; i++) {
        int k = std::countr_zero(i);
        for (const auto &gs : gsupp[k]) {
            double old_v = site_logp(code[gs.site]);
            if (old_v == -kInf) {
                zero_count--;
            } else {
                finite_sum -= old_v;
            }
            code[gs.site] ^= gs.cd;
            double new_v = site_logp(code[gs.site]);
            if (new_v == -kInf) {
                zero_count++;
            } else {
                finite_sum += new_v;
            }
        }
        if (zero_count == 0) {
            z.add(finite_sum);
        }
    }
    return z.value();
}

double coset_probability(const SpacetimePauli &error, const std::vector<SpacetimePauli> &generators,
                         const NoiseChannel &channel) {
    return std::exp(log_coset_probability(error, generators, channel));
}

ExactMlResult exact_ml_success(const Circuit &circuit, const NoiseChannel &channel) {
    const Grid grid = circuit.grid();
    const int sites = grid.sites();
    if (sites > 12) {
        throw TooLargeError("exact_ml_success: more than 12 spacetime qubits");
    }
    const int bits = 2 * sites;  // x plane then z plane

    auto gens = build_gauge_generators(circuit);

    auto pack = [&](const SpacetimePauli &p) {
        uint64_t v = 0;
        for (int s = 0; s < sites; s++) {
            if ((p.x_words[s >> 6] >> (s & 63)) & 1) {
                v |= uint64_t{1} << s;
            }
            if ((p.z_words[s >> 6] >> (s & 63)) & 1) {
                v |= uint64_t{1} << (sites + s);
            }
        }
        return v;
    };

    // Reduced row echelon forms: the gauge span labels cosets, and the span
    // extended by the declared logical representatives labels syndrome
    // groups (cosets in one group are the classes a decoder chooses among).
    auto build_rref = [](const std::vector<uint64_t> &raw) {
        std::vector<uint64_t> rows;
        for (uint64_t v : raw) {
            for (uint64_t r : rows) {
                uint64_t pivot = r & -r;
                if (v & pivot) {
                    v ^= r;
                }
            }
            if (v) {
                for (uint64_t &r : rows) {
                    uint64_t pivot = v & -v;
                    if (r & pivot) {
                        r ^= v;
                    }
                }
                rows.push_back(v);
            }
        }
        return rows;
    };
    std::vector<uint64_t> raw_g, raw_n;
    for (const auto &g : gens) {
        raw_g.push_back(pack(g));
        raw_n.push_back(raw_g.back());
    }
    for (const auto &obs : circuit.observables) {
        raw_n.push_back(pack(obs.representative));
    }
    std::vector<uint64_t> rows_g = build_rref(raw_g);
    std::vector<uint64_t> rows_n = build_rref(raw_n);

    // Canonicalization is linear once a basis is fully reduced.
    auto canon_table = [&](const std::vector<uint64_t> &rows) {
        std::vector<uint64_t> table(bits);
        for (int b = 0; b < bits; b++) {
            uint64_t v = uint64_t{1} << b;
            for (uint64_t r : rows) {
                uint64_t pivot = r & -r;
                if (v & pivot) {
                    v ^= r;
                }
            }
            table[b] = v;
        }
        return table;
    };
    std::vector<uint64_t> canon_bit = canon_table(rows_g);
    std::vector<uint64_t> synd_bit = canon_table(rows_n);

    // Per-bit probability bookkeeping: bit b toggles one site's x or z part.
    auto site_logp = [&](uint8_t cd) {
        static const int to_channel[4] = {0, 1, 3, 2};
        double v = channel.p[to_channel[cd]];
        return v == 0 ? -kInf : std::log(v);
    };
    std::vector<uint8_t> code(sites, 0);
    double finite_sum = 0;
    long zero_count = 0;
    {
        double l0 = site_logp(0);
        if (l0 == -kInf) {
            zero_count = sites;
        } else {
            finite_sum = sites * l0;
        }
    }

    struct Cell {
        double max = -kInf;
        double sum = 0;
        void add(double x) {
            if (x <= max) {
                sum += std::exp(x - max);
            } else {
                sum = sum * std::exp(max - x) + 1.0;
                max = x;
            }
        }
        double value() const {
            return max + std::log(sum);
        }
    };
    std::unordered_map<uint64_t, Cell> cells;  // key: canon | synd<<32 is unsafe; see below
    // canon needs `bits` bits, syndrome nc bits; bits <= 24 so shift is safe.
    auto cell_key = [&](uint64_t canon, uint64_t synd) {
        return canon | (synd << bits);
    };

    uint64_t canon = 0, synd = 0;
    if (zero_count == 0) {
        cells[cell_key(canon, synd)].add(finite_sum);
    }
    const uint64_t total = uint64_t{1} << bits;
    for (uint64_t i = 1; i < total; i++) {
        int b = std::countr_zero(i);
        int site = b % sites;
        uint8_t delta = b < sites ? 1 : 2;
        double old_v = site_logp(code[site]);
        if (old_v == -kInf) {
            zero_count--;
        } else {
            finite_sum -= old_v;
        }
        code[site] ^= delta;
        double new_v = site_logp(code[site]);
        if (new_v == -kInf) {
            zero_count++;
        } else {
            finite_sum += new_v;
        }
        canon ^= canon_bit[b];
        synd ^= synd_bit[b];
        if (zero_count == 0) {
            cells[cell_key(canon, synd)].add(finite_sum);
        }
    }

    // P(success) = sum over syndromes of the largest coset probability.
    std::unordered_map<uint64_t, double> best;  // syndrome -> max coset prob
    for (const auto &[key, cell] : cells) {
        uint64_t s = key >> bits;
        double p = std::exp(cell.value());
        auto it = best.find(s);
        if (it == best.end() || p > it->second) {
            best[s] = p;
        }
    }
    ExactMlResult out;
    out.num_cosets = cells.size();
    out.num_syndromes = best.size();
    for (const auto &[s, p] : best) {
        out.success += p;
    }
    return out;
}

}  // namespace qcsm
