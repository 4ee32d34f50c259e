#ifndef QCSM_ORACLE_H
#define QCSM_ORACLE_H

#include <cstdint>
#include <string>
#include <vector>

#include "qcsm/disorder.h"
#include "qcsm/spinmodel.h"

namespace qcsm {

class TooLargeError : public std::runtime_error {
   public:
    explicit TooLargeError(const std::string &msg) : std::runtime_error(msg) {}
};

// Exact log partition function by Gray-code enumeration of all 2^m spin
// configurations (m <= 24), constants, hard constraints, normalization and
// simplification offsets included. exp of this equals the coset probability
// for a model built from a fully reduced basis.
double exact_partition(const SpinModel &model, const std::vector<int8_t> &eta);

// ln P(E G): enumerates the gauge group (an independent generating subset is
// extracted first) and sums the channel probability of every coset element.
double log_coset_probability(const SpacetimePauli &error, const std::vector<SpacetimePauli> &generators,
                             const NoiseChannel &channel);
double coset_probability(const SpacetimePauli &error, const std::vector<SpacetimePauli> &generators,
                         const NoiseChannel &channel);

struct ExactMlResult {
    double success = 0;       // sum over syndromes of the max coset probability
    size_t num_syndromes = 0;
    size_t num_cosets = 0;
};

// Maximum-likelihood success probability by enumerating every Pauli error on
// the grid (4^sites, sites <= 12). Errors are bucketed by coset (canonical
// form modulo the gauge span) and grouped into syndrome classes modulo the
// span extended by the declared observables, which therefore must generate
// the code's logical classes.
ExactMlResult exact_ml_success(const Circuit &circuit, const NoiseChannel &channel);

}  // namespace qcsm

#endif
