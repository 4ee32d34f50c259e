#ifndef QCSM_DISORDER_H
#define QCSM_DISORDER_H

#include <cstdint>
#include <vector>

#include "qcsm/spinmodel.h"

namespace qcsm {

// Quenched interaction signs. Sign convention: eta_c = -1 exactly when the
// reference error has odd parity on the component, so the no-error
// realization is all +1 and P(eta = -1) = p_eff under the channel (the
// 1 - 2*Bernoulli(p) law).
struct DisorderRealization {
    std::vector<int8_t> eta;
    bool from_sampled_error = false;
    uint64_t seed = 0;
    uint64_t index = 0;
};

// I.i.d. single-site Paulis at every (qubit, layer) drawn from the channel.
// Deterministic in (seed, index); parallel streams never collide.
SpacetimePauli sample_error(Grid grid, const NoiseChannel &channel, uint64_t seed, uint64_t index = 0);

// eta_c from the parity of matching error slots in each interaction.
DisorderRealization signs_from_error(const SpinModel &model, const SpacetimePauli &error);

// eta_c ~ 1 - 2 Bernoulli(p_eff_c), independently per interaction. Component
// slots partition spacetime, so this matches the sampled-error law exactly.
DisorderRealization sample_signs_direct(const SpinModel &model, uint64_t seed, uint64_t index = 0);

// Interactions whose sign flips when the reference error is multiplied by p.
std::vector<int> flipped_interactions(const SpinModel &model, const SpacetimePauli &p);

// Applies sign flips in place.
void apply_flips(std::vector<int8_t> &eta, const std::vector<int> &flips);

}  // namespace qcsm

#endif
