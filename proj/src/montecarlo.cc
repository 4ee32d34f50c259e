#include "qcsm/montecarlo.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcsm {

TemperatureSchedule TemperatureSchedule::geometric(int replicas, double beta_min, double hottest_gap) {
    if (replicas < 2) {
        throw std::invalid_argument("schedule needs at least 2 temperatures");
    }
    if (beta_min < 0 || beta_min >= 1) {
        throw std::invalid_argument("beta_min must lie in [0,1)");
    }
    TemperatureSchedule s;
    double top = 1.0 - beta_min;           // largest 1-beta
    double bottom = std::min(hottest_gap, top * 0.5);  // smallest 1-beta before the pinned 1
    int free_slots = replicas - 1;
    for (int i = 0; i < free_slots; i++) {
        double f = free_slots == 1 ? 0.0 : static_cast<double>(i) / (free_slots - 1);
        s.betas.push_back(1.0 - top * std::pow(bottom / top, f));
    }
    s.betas.push_back(1.0);
    s.validate();
    return s;
}

void TemperatureSchedule::validate(bool require_zero_start) const {
    if (betas.size() < 2) {
        throw std::invalid_argument("schedule needs at least 2 temperatures");
    }
    for (size_t i = 1; i < betas.size(); i++) {
        if (!(betas[i] > betas[i - 1])) {
            throw std::invalid_argument("schedule must ascend strictly");
        }
    }
    if (betas.back() != 1.0) {
        throw std::invalid_argument("schedule must end exactly at beta = 1");
    }
    if (require_zero_start && betas.front() != 0.0) {
        throw std::invalid_argument("schedule must start at beta = 0");
    }
}

double FreeEnergyEstimate::sigma() const {
    return std::sqrt(std::max(0.0, variance));
}

McModel McModel::compile(const SpinModel &model, int side) {
    if (side >= 0 && !model.has_css_split) {
        throw std::invalid_argument("model has no CSS split");
    }
    McModel mc;
    std::vector<int> spin_map(model.num_spins, -1);
    if (side < 0) {
        mc.num_spins = model.num_spins;
        for (int k = 0; k < model.num_spins; k++) {
            spin_map[k] = k;
        }
    } else {
        for (int k = 0; k < model.num_spins; k++) {
            if (model.spin_side[k] == side) {
                spin_map[k] = mc.num_spins++;
            }
        }
    }
    for (size_t c = 0; c < model.interactions.size(); c++) {
        const auto &ia = model.interactions[c];
        if (ia.is_constant()) {
            continue;
        }
        if (side >= 0 && model.interaction_side[c] != side) {
            continue;
        }
        if (std::isinf(ia.coupling)) {
            throw std::invalid_argument("sampling view would contain an infinite coupling");
        }
        std::vector<int> local;
        for (int k : ia.spins) {
            if (spin_map[k] < 0) {
                throw std::logic_error("css split leaks a spin across sides");
            }
            local.push_back(spin_map[k]);
        }
        mc.coupling.push_back(ia.coupling);
        mc.spins.push_back(std::move(local));
        mc.model_interaction.push_back(static_cast<int>(c));
    }
    // CSR adjacency.
    std::vector<int> counts(mc.num_spins, 0);
    for (const auto &ss : mc.spins) {
        for (int k : ss) {
            counts[k]++;
        }
    }
    mc.adj_start.assign(mc.num_spins + 1, 0);
    for (int k = 0; k < mc.num_spins; k++) {
        mc.adj_start[k + 1] = mc.adj_start[k] + counts[k];
    }
    mc.adj.assign(mc.adj_start.back(), 0);
    std::vector<int> fill = mc.adj_start;
    for (size_t c = 0; c < mc.spins.size(); c++) {
        for (int k : mc.spins[c]) {
            mc.adj[fill[k]++] = static_cast<int>(c);
        }
    }
    return mc;
}

std::vector<int8_t> McModel::slice_eta(const std::vector<int8_t> &full_eta) const {
    std::vector<int8_t> out(model_interaction.size());
    for (size_t c = 0; c < model_interaction.size(); c++) {
        out[c] = full_eta[model_interaction[c]];
    }
    return out;
}

void replica_recompute(const McModel &mc, const std::vector<int8_t> &eta, Replica *r) {
    r->s.resize(mc.spins.size());
    double e = 0, comp = 0;
    for (size_t c = 0; c < mc.spins.size(); c++) {
        int s = eta[c];
        for (int k : mc.spins[c]) {
            s *= r->sigma[k];
        }
        r->s[c] = static_cast<int8_t>(s);
        double term = -mc.coupling[c] * s;
        double y = term - comp;
        double t = e + y;
        comp = (t - e) - y;
        e = t;
    }
    r->energy = e;
}

void replica_init_random(const McModel &mc, const std::vector<int8_t> &eta, Rng &rng, Replica *out) {
    out->sigma.resize(mc.num_spins);
    for (int k = 0; k < mc.num_spins; k++) {
        out->sigma[k] = rng.next_bits() & 1 ? 1 : -1;
    }
    replica_recompute(mc, eta, out);
}

void metropolis_sweep(const McModel &mc, Replica &r, double beta, Rng &rng) {
    for (int k = 0; k < mc.num_spins; k++) {
        double local = 0;
        for (int idx = mc.adj_start[k]; idx < mc.adj_start[k + 1]; idx++) {
            int c = mc.adj[idx];
            local += mc.coupling[c] * r.s[c];
        }
        double dE = 2.0 * local;
        if (dE <= 0 || rng.unit() < std::exp(-beta * dE)) {
            r.sigma[k] = -r.sigma[k];
            for (int idx = mc.adj_start[k]; idx < mc.adj_start[k + 1]; idx++) {
                r.s[mc.adj[idx]] = -r.s[mc.adj[idx]];
            }
            r.energy += dE;
        }
    }
}

void replica_exchange(std::vector<Replica> &ladder, const TemperatureSchedule &schedule, Rng &rng,
                      int parity) {
    for (size_t i = parity & 1; i + 1 < ladder.size(); i += 2) {
        double db = schedule.betas[i + 1] - schedule.betas[i];
        double de = ladder[i + 1].energy - ladder[i].energy;
        double arg = db * de;
        if (arg >= 0 || rng.unit() < std::exp(arg)) {
            std::swap(ladder[i], ladder[i + 1]);
        }
    }
}

std::vector<SpacetimePauli> decompose_logical(const SpacetimePauli &L) {
    std::vector<SpacetimePauli> out;
    for (const auto &c : support(L)) {  // already (layer, qubit) ordered
        SpacetimePauli q(L.grid);
        const char names[4] = {'I', 'X', 'Z', 'Y'};
        q.set_pauli(c.qubit, c.layer, names[L.pauli_at(c.qubit, c.layer)]);
        out.push_back(std::move(q));
    }
    return out;
}

namespace {

// Interactions whose sign differs between adjacent chain elements.
std::vector<std::vector<int>> chain_diffs(const std::vector<std::vector<int8_t>> &chain, int bound) {
    std::vector<std::vector<int>> diffs;
    for (size_t m = 1; m < chain.size(); m++) {
        if (chain[m].size() != chain[0].size()) {
            throw std::invalid_argument("chain elements differ in size");
        }
        std::vector<int> d;
        for (size_t c = 0; c < chain[m].size(); c++) {
            if (chain[m][c] != chain[m - 1][c]) {
                d.push_back(static_cast<int>(c));
            }
        }
        if (static_cast<int>(d.size()) > bound) {
            throw NonAdjacentChainError("chain step flips " + std::to_string(d.size()) +
                                        " signs, above the bound of " + std::to_string(bound));
        }
        diffs.push_back(std::move(d));
    }
    return diffs;
}

struct BennettAccum {
    // Per step, per block: sums of the forward/backward acceptance functions.
    std::vector<std::vector<double>> num, den;
    std::vector<std::vector<long>> count;
};

double bennett_estimate(const BennettAccum &acc, int skip_block) {
    double total = 0;
    for (size_t m = 0; m < acc.num.size(); m++) {
        double n = 0, d = 0;
        long cnt = 0;
        for (size_t b = 0; b < acc.num[m].size(); b++) {
            if (static_cast<int>(b) == skip_block) {
                continue;
            }
            n += acc.num[m][b];
            d += acc.den[m][b];
            cnt += acc.count[m][b];
        }
        if (n <= 0 || d <= 0 || cnt == 0) {
            throw std::runtime_error("bennett estimator starved; increase sweeps");
        }
        total += -(std::log(n) - std::log(d));
    }
    return total;
}

}  // namespace

FreeEnergyEstimate bennett_delta_f(const McModel &mc, const std::vector<std::vector<int8_t>> &eta_chain,
                                   const BennettParams &params, uint64_t seed) {
    params.schedule.validate();
    if (eta_chain.empty()) {
        throw std::invalid_argument("empty disorder chain");
    }
    const int M = static_cast<int>(eta_chain.size()) - 1;
    const int R = static_cast<int>(params.schedule.betas.size());
    FreeEnergyEstimate est;
    est.method = "bennett";
    est.replicas = R;
    est.seed = seed;
    est.sweeps = params.therm_sweeps + params.measure_sweeps;
    if (M == 0) {
        // Identity chain: dF = 0 exactly.
        return est;
    }
    auto diffs = chain_diffs(eta_chain, params.max_flips_per_step);

    const int B = std::max(2, params.jackknife_blocks);
    BennettAccum acc;
    acc.num.assign(M, std::vector<double>(B, 0));
    acc.den.assign(M, std::vector<double>(B, 0));
    acc.count.assign(M, std::vector<long>(B, 0));

    std::vector<std::vector<Replica>> ladders(M + 1, std::vector<Replica>(R));
    std::vector<Rng> rngs;
    rngs.reserve(M + 1);
    for (int l = 0; l <= M; l++) {
        rngs.emplace_back(seed, 0x1adde2000ull + static_cast<uint64_t>(l));
        for (int r = 0; r < R; r++) {
            if (params.cold_start) {
                ladders[l][r].sigma.assign(mc.num_spins, 1);
                for (int k : params.init_flip_spins) {
                    ladders[l][r].sigma[k] = -1;
                }
                replica_recompute(mc, eta_chain[l], &ladders[l][r]);
            } else {
                replica_init_random(mc, eta_chain[l], rngs[l], &ladders[l][r]);
            }
        }
    }

    int start_sweep = 0;
    // Resume from a checkpoint when shapes match.
    if (!params.checkpoint_path.empty()) {
        std::ifstream in(params.checkpoint_path);
        if (in) {
            std::string magic;
            int cm, cr, cspins, csweep, cblocks;
            in >> magic >> cm >> cr >> cspins >> csweep >> cblocks;
            if (magic == "qcsm-bennett-v1" && cm == M && cr == R && cspins == mc.num_spins &&
                cblocks == B) {
                start_sweep = csweep;
                for (int l = 0; l <= M; l++) {
                    uint64_t st[4];
                    for (auto &w : st) {
                        in >> w;
                    }
                    rngs[l].load_state(st);
                    for (int r = 0; r < R; r++) {
                        std::string bitstr;
                        in >> bitstr;
                        for (int k = 0; k < mc.num_spins; k++) {
                            ladders[l][r].sigma[k] = bitstr[k] == '1' ? 1 : -1;
                        }
                        replica_recompute(mc, eta_chain[l], &ladders[l][r]);
                    }
                }
                for (int m = 0; m < M; m++) {
                    for (int b = 0; b < B; b++) {
                        in >> acc.num[m][b] >> acc.den[m][b] >> acc.count[m][b];
                    }
                }
            }
        }
    }

    const int total_sweeps = params.therm_sweeps + params.measure_sweeps;
    for (int sweep = start_sweep; sweep < total_sweeps; sweep++) {
        for (int l = 0; l <= M; l++) {
            for (int r = 0; r < R; r++) {
                metropolis_sweep(mc, ladders[l][r], params.schedule.betas[r], rngs[l]);
            }
            replica_exchange(ladders[l], params.schedule, rngs[l], sweep & 1);
        }
#ifndef NDEBUG
        if (sweep % 256 == 0) {
            Replica check = ladders[0][R - 1];
            replica_recompute(mc, eta_chain[0], &check);
            assert(std::abs(check.energy - ladders[0][R - 1].energy) < 1e-6 * (1 + std::abs(check.energy)));
        }
#endif
        if (sweep < params.therm_sweeps) {
            continue;
        }
        int block = static_cast<int>((static_cast<long>(sweep - params.therm_sweeps) * B) /
                                     params.measure_sweeps);
        block = std::min(block, B - 1);
        for (int m = 1; m <= M; m++) {
            // Cross-score physical replicas: placing the ladder-(m-1) spins
            // under disorder m costs sum over flipped c of 2 K_c s_c.
            const Replica &lo = ladders[m - 1][R - 1];
            const Replica &hi = ladders[m][R - 1];
            double de_fwd = 0, de_bwd = 0;
            for (int c : diffs[m - 1]) {
                de_fwd += 2.0 * mc.coupling[c] * lo.s[c];
                de_bwd += 2.0 * mc.coupling[c] * hi.s[c];
            }
            acc.num[m - 1][block] += std::min(1.0, std::exp(-de_fwd));
            acc.den[m - 1][block] += std::min(1.0, std::exp(-de_bwd));
            acc.count[m - 1][block]++;
        }
        if (params.checkpoint_every > 0 && !params.checkpoint_path.empty() &&
            (sweep + 1) % params.checkpoint_every == 0) {
            std::ofstream out(params.checkpoint_path + ".tmp");
            out << "qcsm-bennett-v1 " << M << ' ' << R << ' ' << mc.num_spins << ' ' << sweep + 1 << ' '
                << B << "\n";
            out.precision(17);
            for (int l = 0; l <= M; l++) {
                uint64_t st[4];
                rngs[l].save_state(st);
                out << st[0] << ' ' << st[1] << ' ' << st[2] << ' ' << st[3] << "\n";
                for (int r = 0; r < R; r++) {
                    for (int k = 0; k < mc.num_spins; k++) {
                        out << (ladders[l][r].sigma[k] > 0 ? '1' : '0');
                    }
                    out << "\n";
                }
            }
            for (int m = 0; m < M; m++) {
                for (int b = 0; b < B; b++) {
                    out << acc.num[m][b] << ' ' << acc.den[m][b] << ' ' << acc.count[m][b] << "\n";
                }
            }
            out.close();
            std::rename((params.checkpoint_path + ".tmp").c_str(), params.checkpoint_path.c_str());
        }
    }

    est.value = bennett_estimate(acc, -1);
    std::vector<double> loo;
    for (int b = 0; b < B; b++) {
        loo.push_back(bennett_estimate(acc, b));
    }
    double bar = 0;
    for (double v : loo) {
        bar += v;
    }
    bar /= B;
    double var = 0;
    for (double v : loo) {
        var += (v - bar) * (v - bar);
    }
    est.variance = var * (B - 1.0) / B;
    return est;
}

FreeEnergyEstimate bennett_delta_f(const SpinModel &model, const std::vector<DisorderRealization> &chain,
                                   const BennettParams &params, uint64_t seed) {
    McModel mc = McModel::compile(model);
    std::vector<std::vector<int8_t>> slices;
    for (const auto &r : chain) {
        slices.push_back(mc.slice_eta(r.eta));
    }
    FreeEnergyEstimate est = bennett_delta_f(mc, slices, params, seed);
    est.value += constant_free_energy(model, chain.back().eta) -
                 constant_free_energy(model, chain.front().eta);
    return est;
}

double constant_free_energy(const SpinModel &model, const std::vector<int8_t> &eta) {
    double f = -model.log_norm - model.log_offset;
    for (size_t c = 0; c < model.interactions.size(); c++) {
        const auto &ia = model.interactions[c];
        if (ia.is_constant()) {
            // A constant term multiplies Z by exp(lw(eta)); lw folds the
            // coupling and its symmetric normalization part (exact at p=0).
            f -= eta[c] > 0 ? ia.lw_plus : ia.lw_minus;
        } else {
            // Sign-independent normalization of the sampled interactions,
            // so estimates line up with the exact log partition function.
            f -= 0.5 * (ia.lw_plus + ia.lw_minus);
        }
    }
    return f;
}

FreeEnergyEstimate population_annealing_f(const McModel &mc, const std::vector<int8_t> &eta,
                                          const PopulationParams &params, uint64_t seed) {
    params.schedule.validate(true);
    const int R = params.population;
    if (R < 2) {
        throw std::invalid_argument("population must be at least 2");
    }
    const int G = std::max(2, params.repeats);

    std::vector<double> estimates;
    for (int g = 0; g < G; g++) {
        Rng rng(seed, 0x9a9a000ull + static_cast<uint64_t>(g));
        std::vector<Replica> pop(R);
        for (int r = 0; r < R; r++) {
            replica_init_random(mc, eta, rng, &pop[r]);
        }
        double f = -static_cast<double>(mc.num_spins) * std::log(2.0);
        for (size_t k = 0; k + 1 < params.schedule.betas.size(); k++) {
            double db = params.schedule.betas[k + 1] - params.schedule.betas[k];
            // Weights relative to the population minimum to avoid overflow.
            double emin = pop[0].energy;
            for (const auto &p : pop) {
                emin = std::min(emin, p.energy);
            }
            std::vector<double> tau(R);
            double sum = 0, sum2 = 0;
            for (int r = 0; r < R; r++) {
                tau[r] = std::exp(-db * (pop[r].energy - emin));
                sum += tau[r];
                sum2 += tau[r] * tau[r];
            }
            double ess = sum * sum / sum2;
            if (ess < params.min_ess_fraction * R) {
                throw PopulationCollapseError("effective sample size " + std::to_string(ess) +
                                              " below threshold at beta " +
                                              std::to_string(params.schedule.betas[k + 1]));
            }
            f -= std::log(sum / R) - db * emin;
            // Multinomial resampling.
            std::vector<double> cdf(R);
            double accum = 0;
            for (int r = 0; r < R; r++) {
                accum += tau[r];
                cdf[r] = accum;
            }
            std::vector<Replica> next;
            next.reserve(R);
            for (int r = 0; r < R; r++) {
                double u = rng.unit() * accum;
                int idx = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                idx = std::min(idx, R - 1);
                next.push_back(pop[idx]);
            }
            pop = std::move(next);
            for (int r = 0; r < R; r++) {
                for (int s = 0; s < params.sweeps_per_step; s++) {
                    metropolis_sweep(mc, pop[r], params.schedule.betas[k + 1], rng);
                }
            }
        }
        estimates.push_back(f);
    }

    FreeEnergyEstimate est;
    est.method = "population_annealing";
    est.replicas = R;
    est.seed = seed;
    est.sweeps = static_cast<long>(params.schedule.betas.size()) * params.sweeps_per_step;
    double bar = 0;
    for (double v : estimates) {
        bar += v;
    }
    bar /= G;
    est.value = bar;
    double var = 0;
    for (double v : estimates) {
        var += (v - bar) * (v - bar);
    }
    est.variance = var / (G * (G - 1.0));
    return est;
}

FreeEnergyEstimate population_annealing_f(const SpinModel &model, const DisorderRealization &eta,
                                          const PopulationParams &params, uint64_t seed) {
    McModel mc = McModel::compile(model);
    FreeEnergyEstimate est = population_annealing_f(mc, mc.slice_eta(eta.eta), params, seed);
    est.value += constant_free_energy(model, eta.eta);
    return est;
}

}  // namespace qcsm
