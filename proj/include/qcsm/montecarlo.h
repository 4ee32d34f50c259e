#ifndef QCSM_MONTECARLO_H
#define QCSM_MONTECARLO_H

#include <string>
#include <vector>

#include "qcsm/disorder.h"
#include "qcsm/rng.h"
#include "qcsm/spinmodel.h"

namespace qcsm {

// Ascending inverse temperatures with the physical replica pinned at 1.
struct TemperatureSchedule {
    std::vector<double> betas;

    // Geometric spacing in (1 - beta) from beta_min up to hottest_gap below
    // 1, with beta = 1 appended.
    static TemperatureSchedule geometric(int replicas, double beta_min = 0.0, double hottest_gap = 0.04);
    void validate(bool require_zero_start = false) const;
};

struct FreeEnergyEstimate {
    double value = 0;
    double variance = 0;
    std::string method;
    long sweeps = 0;
    int replicas = 0;
    uint64_t seed = 0;

    double sigma() const;
};

// Sampling view of a model: the finite-coupling, non-constant interactions.
// Constant terms are handled analytically by callers.
struct McModel {
    int num_spins = 0;
    std::vector<double> coupling;
    std::vector<std::vector<int>> spins;
    std::vector<int> model_interaction;  // index into SpinModel::interactions
    std::vector<int> adj_start;          // CSR spin -> interaction
    std::vector<int> adj;

    // side: -1 for the whole model, 0/1 for a CSS half.
    static McModel compile(const SpinModel &model, int side = -1);
    std::vector<int8_t> slice_eta(const std::vector<int8_t> &full_eta) const;
};

struct Replica {
    std::vector<int8_t> sigma;
    std::vector<int8_t> s;  // eta_c * prod_{k in c} sigma_k
    double energy = 0;      // -sum_c K_c s_c
};

void replica_init_random(const McModel &mc, const std::vector<int8_t> &eta, Rng &rng, Replica *out);
void replica_recompute(const McModel &mc, const std::vector<int8_t> &eta, Replica *r);

// One sweep: num_spins sequential single-spin proposals, each accepted with
// min{1, exp(-beta dE)}.
void metropolis_sweep(const McModel &mc, Replica &r, double beta, Rng &rng);

// Swaps adjacent-temperature configurations with the tempering acceptance
// min{1, exp[(b_{i+1}-b_i)(E_{i+1}-E_i)]}; pairs alternate with `parity`.
void replica_exchange(std::vector<Replica> &ladder, const TemperatureSchedule &schedule, Rng &rng,
                      int parity);

class NonAdjacentChainError : public std::runtime_error {
   public:
    explicit NonAdjacentChainError(const std::string &msg) : std::runtime_error(msg) {}
};
class PopulationCollapseError : public std::runtime_error {
   public:
    explicit PopulationCollapseError(const std::string &msg) : std::runtime_error(msg) {}
};

struct BennettParams {
    TemperatureSchedule schedule = TemperatureSchedule::geometric(12);
    int therm_sweeps = 1000;
    int measure_sweeps = 4000;
    int jackknife_blocks = 20;
    int max_flips_per_step = 8;
    bool cold_start = false;
    std::vector<int> init_flip_spins;  // applied to cold starts (gauge-sector picks)
    std::string checkpoint_path;
    int checkpoint_every = 0;
};

// Multi-step Bennett acceptance-ratio estimate of F[last] - F[first] along a
// chain of disorder realizations differing by few sign flips. Simulates one
// tempering ladder per chain element in lockstep and cross-scores the
// physical replicas every sweep after thermalization.
FreeEnergyEstimate bennett_delta_f(const McModel &mc, const std::vector<std::vector<int8_t>> &eta_chain,
                                   const BennettParams &params, uint64_t seed);

// Convenience wrapper on a full model: compiles the sampling view, slices the
// chain, and adds the exact constant-term difference.
FreeEnergyEstimate bennett_delta_f(const SpinModel &model, const std::vector<DisorderRealization> &chain,
                                   const BennettParams &params, uint64_t seed);

// Single-site factors of L in (layer, qubit) lexicographic order; their
// product is L.
std::vector<SpacetimePauli> decompose_logical(const SpacetimePauli &L);

struct PopulationParams {
    TemperatureSchedule schedule = TemperatureSchedule::geometric(30);  // must start at 0
    int population = 1000;
    int sweeps_per_step = 5;
    double min_ess_fraction = 0.02;
    int repeats = 8;  // independent populations; variance from their spread
};

// Population-annealing estimate of the absolute free energy -ln Z of the
// sampling view; the beta=0 start makes the reference exactly -m ln 2.
FreeEnergyEstimate population_annealing_f(const McModel &mc, const std::vector<int8_t> &eta,
                                          const PopulationParams &params, uint64_t seed);

// Full-model wrapper: adds constant terms, normalization and offsets so the
// value is comparable with exact_partition.
FreeEnergyEstimate population_annealing_f(const SpinModel &model, const DisorderRealization &eta,
                                          const PopulationParams &params, uint64_t seed);

// Exact constant-term part of F for a full model: -sum_const K_c eta_c plus
// -log_norm - log_offset.
double constant_free_energy(const SpinModel &model, const std::vector<int8_t> &eta);

}  // namespace qcsm

#endif
