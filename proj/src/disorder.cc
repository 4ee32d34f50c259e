#include "qcsm/disorder.h"

#include <stdexcept>

#include "qcsm/rng.h"

namespace qcsm {

SpacetimePauli sample_error(Grid grid, const NoiseChannel &channel, uint64_t seed, uint64_t index) {
    SpacetimePauli e(grid);
    if (channel.independent_xz) {
        for (int layer = 0; layer < grid.num_layers; layer++) {
            for (int q = 0; q < grid.num_qubits; q++) {
                uint64_t site = static_cast<uint64_t>(grid.site(q, layer));
                if (counter_unit(seed, index, site, 0) < channel.px) {
                    e.set_x(q, layer, true);
                }
                if (counter_unit(seed, index, site, 1) < channel.pz) {
                    e.set_z(q, layer, true);
                }
            }
        }
    } else {
        for (int layer = 0; layer < grid.num_layers; layer++) {
            for (int q = 0; q < grid.num_qubits; q++) {
                uint64_t site = static_cast<uint64_t>(grid.site(q, layer));
                double u = counter_unit(seed, index, site, 2);
                double acc = 0;
                int which = 0;
                for (int a = 0; a < 4; a++) {
                    acc += channel.p[a];
                    if (u < acc) {
                        which = a;
                        break;
                    }
                }
                const char names[4] = {'I', 'X', 'Y', 'Z'};
                e.set_pauli(q, layer, names[which]);
            }
        }
    }
    return e;
}

namespace {

bool member_anticommutes(const Member &m, const SpacetimePauli &e) {
    bool ex = e.x_bit(m.qubit, m.layer);
    bool ez = e.z_bit(m.qubit, m.layer);
    switch (m.test) {
        case 1:  // X
            return ez;
        case 2:  // Z
            return ex;
        case 3:  // Y
            return ex ^ ez;
    }
    return false;
}

}  // namespace

DisorderRealization signs_from_error(const SpinModel &model, const SpacetimePauli &error) {
    DisorderRealization r;
    r.from_sampled_error = true;
    r.eta.resize(model.interactions.size());
    for (size_t c = 0; c < model.interactions.size(); c++) {
        int parity = 0;
        for (const auto &m : model.interactions[c].members) {
            parity ^= member_anticommutes(m, error) ? 1 : 0;
        }
        r.eta[c] = parity ? -1 : +1;
    }
    return r;
}

DisorderRealization sample_signs_direct(const SpinModel &model, uint64_t seed, uint64_t index) {
    if (!model.independent_xz) {
        throw std::invalid_argument("sample_signs_direct requires an independent X-Z model");
    }
    DisorderRealization r;
    r.seed = seed;
    r.index = index;
    r.eta.resize(model.interactions.size());
    for (size_t c = 0; c < model.interactions.size(); c++) {
        double u = counter_unit(seed, index, static_cast<uint64_t>(c), 7);
        r.eta[c] = u < model.interactions[c].p_eff ? -1 : +1;
    }
    return r;
}

std::vector<int> flipped_interactions(const SpinModel &model, const SpacetimePauli &p) {
    std::vector<int> out;
    for (size_t c = 0; c < model.interactions.size(); c++) {
        int parity = 0;
        for (const auto &m : model.interactions[c].members) {
            parity ^= member_anticommutes(m, p) ? 1 : 0;
        }
        if (parity) {
            out.push_back(static_cast<int>(c));
        }
    }
    return out;
}

void apply_flips(std::vector<int8_t> &eta, const std::vector<int> &flips) {
    for (int c : flips) {
        eta[c] = -eta[c];
    }
}

}  // namespace qcsm
