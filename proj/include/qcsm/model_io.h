#ifndef QCSM_MODEL_IO_H
#define QCSM_MODEL_IO_H

#include <string>

#include "qcsm/disorder.h"
#include "qcsm/spinmodel.h"

namespace qcsm {

// Text model file: header (spins, interaction count, css flag), then one
// record per interaction with spin indices, coupling, weights, member list.
std::string model_to_text(const SpinModel &model);

// JSON graph export: vertices are spins, hyperedges are interactions.
std::string model_to_graph_json(const SpinModel &model);

// Sign vector alongside a model file; seeds recorded.
std::string realization_to_text(const DisorderRealization &r);

}  // namespace qcsm

#endif
