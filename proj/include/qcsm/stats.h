#ifndef QCSM_STATS_H
#define QCSM_STATS_H

#include <cstdint>
#include <functional>
#include <vector>

namespace qcsm {

double mean(const std::vector<double> &xs);

// Leave-one-out jackknife variance of an arbitrary estimator. The estimator
// receives the samples with one entry removed.
double jackknife_variance(const std::vector<double> &samples,
                          const std::function<double(const std::vector<double> &)> &estimator);

// Fast path for the sample-mean estimator: ((n-1)/n) sum (theta_-i - bar)^2
// collapses to s^2/n.
double jackknife_variance_of_mean(const std::vector<double> &samples);

// Block jackknife over equal-ish contiguous blocks; suits correlated series.
double block_jackknife_variance(const std::vector<double> &samples, int blocks,
                                const std::function<double(const std::vector<double> &)> &estimator);

// Bootstrap variance with B resamples (with replacement), fixed seed.
double bootstrap_variance(const std::vector<double> &samples, int resamples, uint64_t seed,
                          const std::function<double(const std::vector<double> &)> &estimator);

// Chi-squared upper critical value at significance 0.01 (Wilson-Hilferty).
double chi2_critical_p01(int dof);

}  // namespace qcsm

#endif
