#include "qcsm/stats.h"

#include <cmath>
#include <stdexcept>

#include "qcsm/rng.h"

namespace qcsm {

double mean(const std::vector<double> &xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mean of empty sample");
    }
    double s = 0, comp = 0;
    for (double x : xs) {
        double y = x - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s / static_cast<double>(xs.size());
}

double jackknife_variance(const std::vector<double> &samples,
                          const std::function<double(const std::vector<double> &)> &estimator) {
    size_t n = samples.size();
    if (n < 2) {
        throw std::invalid_argument("jackknife needs at least 2 samples");
    }
    std::vector<double> loo(n);
    std::vector<double> reduced(samples.begin() + 1, samples.end());
    for (size_t i = 0; i < n; i++) {
        if (i > 0) {
            reduced[i - 1] = samples[i - 1];
        }
        loo[i] = estimator(reduced);
    }
    double bar = mean(loo);
    double acc = 0;
    for (double v : loo) {
        acc += (v - bar) * (v - bar);
    }
    return acc * static_cast<double>(n - 1) / static_cast<double>(n);
}

double jackknife_variance_of_mean(const std::vector<double> &samples) {
    size_t n = samples.size();
    if (n < 2) {
        throw std::invalid_argument("jackknife needs at least 2 samples");
    }
    double m = mean(samples);
    double acc = 0;
    for (double v : samples) {
        acc += (v - m) * (v - m);
    }
    // ((n-1)/n) sum (theta_-i - bar)^2 collapses to s^2/n for the mean.
    return acc / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double block_jackknife_variance(const std::vector<double> &samples, int blocks,
                                const std::function<double(const std::vector<double> &)> &estimator) {
    size_t n = samples.size();
    if (blocks < 2 || n < static_cast<size_t>(blocks)) {
        throw std::invalid_argument("block jackknife needs at least 2 blocks of data");
    }
    std::vector<double> loo;
    for (int b = 0; b < blocks; b++) {
        size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
        std::vector<double> reduced;
        reduced.reserve(n - (hi - lo));
        reduced.insert(reduced.end(), samples.begin(), samples.begin() + lo);
        reduced.insert(reduced.end(), samples.begin() + hi, samples.end());
        loo.push_back(estimator(reduced));
    }
    double bar = mean(loo);
    double acc = 0;
    for (double v : loo) {
        acc += (v - bar) * (v - bar);
    }
    return acc * static_cast<double>(blocks - 1) / static_cast<double>(blocks);
}

double bootstrap_variance(const std::vector<double> &samples, int resamples, uint64_t seed,
                          const std::function<double(const std::vector<double> &)> &estimator) {
    size_t n = samples.size();
    if (n < 2 || resamples < 2) {
        throw std::invalid_argument("bootstrap needs data and resamples");
    }
    Rng rng(seed, 0xb007);
    std::vector<double> draw(n);
    std::vector<double> est;
    est.reserve(resamples);
    for (int b = 0; b < resamples; b++) {
        for (size_t i = 0; i < n; i++) {
            draw[i] = samples[rng.below(n)];
        }
        est.push_back(estimator(draw));
    }
    double bar = mean(est);
    double acc = 0;
    for (double v : est) {
        acc += (v - bar) * (v - bar);
    }
    return acc / static_cast<double>(est.size() - 1);
}

double chi2_critical_p01(int dof) {
    if (dof < 1) {
        throw std::invalid_argument("chi2 dof must be positive");
    }
    // Wilson-Hilferty: chi2_q ~ dof * (1 - 2/(9 dof) + z_q sqrt(2/(9 dof)))^3
    const double z99 = 2.3263478740408408;
    double k = static_cast<double>(dof);
    double t = 1.0 - 2.0 / (9.0 * k) + z99 * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

}  // namespace qcsm
