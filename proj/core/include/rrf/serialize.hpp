#pragma once

#include <string>

#include "rrf/atoms.hpp"
#include "rrf/dense_net.hpp"
#include "rrf/random_feature_model.hpp"

namespace rrf {

// JSON text forms for inspection and cross-language checks. Networks share one
// layout: {"kind", "layers": [{"rows", "cols", "weights" (row-major), "bias",
// "activation"}], ...}. Doubles survive a round trip bit-exactly.

std::string to_json(const AtomicFunction& f);
AtomicFunction atomic_function_from_json(const std::string& text);

std::string to_json(const AssembledNet& net);
AssembledNet assembled_net_from_json(const std::string& text);

std::string to_json(const DenseNet& net);
DenseNet dense_net_from_json(const std::string& text);

// Checkpoint: the network layers plus the exact feature bank and radius.
std::string to_json(const RandomFeatureModel& model);
RandomFeatureModel random_feature_model_from_json(const std::string& text);

}  // namespace rrf
