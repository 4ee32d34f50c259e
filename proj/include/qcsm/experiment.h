#ifndef QCSM_EXPERIMENT_H
#define QCSM_EXPERIMENT_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcsm/montecarlo.h"
#include "qcsm/oracle.h"

namespace qcsm {

struct MlOutcome {
    double success_softmax = 1.0;  // max_L e^{-dF_L} / sum_L e^{-dF_L}
    bool success_argmax = true;    // identity class attains the max
};

// Inputs are free-energy differences of the nontrivial classes relative to
// the sampled class; the identity contributes dF = 0.
MlOutcome ml_success(const std::vector<double> &delta_f);

struct ExperimentConfig {
    std::string builtin;                  // circuit family name
    std::string circuit_file;             // alternative to builtin
    std::vector<int> distances;
    std::optional<int> duration;          // override family default T
    std::string cnot_schedule = "midpoint";
    std::vector<double> p_values;         // p_X grid
    double pz = 0.0;
    std::vector<std::string> class_names; // default: every declared observable
    int realizations = 1000;
    std::string method = "bennett";       // bennett | population

    int replicas = 10;
    double beta_min = 0.0;
    double hottest_gap = 0.08;
    int therm_sweeps = 400;
    int measure_sweeps = 1200;
    int jackknife_blocks = 16;

    int population = 400;
    int pa_steps = 24;
    int pa_sweeps_per_step = 4;
    int pa_repeats = 4;

    uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    std::string output_prefix;
};

ExperimentConfig parse_experiment_config(const std::string &json_text);

struct CurvePoint {
    int d = 0;
    double p = 0;
    double rate = 0;            // 1 - mean softmax success
    double ci = 0;              // 2 sigma jackknife half-width
    long n = 0;
    uint64_t seed = 0;
    double rate_argmax = 0;     // secondary: 1 - mean argmax indicator
};

struct ExperimentResult {
    std::vector<CurvePoint> points;
    std::string manifest_json;
    std::string csv;
};

ExperimentResult run_experiment(const ExperimentConfig &config);

class NoCrossingError : public std::runtime_error {
   public:
    explicit NoCrossingError(const std::string &msg) : std::runtime_error(msg) {}
};

struct ThresholdEstimate {
    double x_c = 0, y_c = 0;
    double ci_lo = 0, ci_hi = 0;  // bootstrap 95%
    double sigma = 0;
    double window_lo = 0, window_hi = 0;
    std::vector<int> distances;
    std::vector<double> slopes, intercepts;
    bool in_window = false;
};

// Weighted least-squares line per distance inside the window, then the joint
// least-squares intersection; bootstrap CI by perturbing each point within
// its jackknife error.
ThresholdEstimate estimate_threshold(const std::vector<CurvePoint> &points, double window_lo,
                                     double window_hi, uint64_t seed = 0x7157, int resamples = 1000);

// Energy change of the cheapest gauge deformation of the spatial logical,
// standard minus dynamic compilation: 2K(1) - [4K(2) - 2K(3)] for the
// repetition family, 2K(5) - [4K(4) - 2K(3)] for the toric family.
double barrier_difference(const std::string &family, double p);
// Closed-form p -> 0 limit of the same difference.
double barrier_difference_limit(const std::string &family);

std::string curve_points_to_csv(const std::vector<CurvePoint> &points);
std::vector<CurvePoint> curve_points_from_csv(const std::string &text);

}  // namespace qcsm

#endif
