#pragma once

#include <vector>

#include "rrf/dataset.hpp"
#include "rrf/features.hpp"
#include "rrf/loss.hpp"
#include "rrf/optim.hpp"

namespace rrf {

/// f(x) = C^T phi(x): frozen random features with trained outer weights C
/// (N x K) kept inside the Frobenius ball of radius R.
struct RandomFeatureModel {
    FeatureBank bank;
    Matrix outer;
    double radius = 1e3;

    Matrix predict(const Matrix& x) const;
    Matrix predict(const FeatureMatrix& features) const;
};

/// C unchanged when |C|_F <= R, else C R / |C|_F.
Matrix project_ball(const Matrix& outer, double radius);

struct RrfTrainResult {
    RandomFeatureModel model;
    std::vector<TraceRow> trace;
    double train_seconds = 0.0;  // optimization only; feature evaluation excluded
};

/// Samples the bank once, evaluates the feature matrix, then runs minibatch SGD
/// (or Adam) on the outer weights with a projection onto the radius-R ball
/// after every step. Throws TrainingError when the loss becomes non-finite.
RrfTrainResult train_rrf(const Dataset& data, const FeatureSpec& spec, LossKind loss, const TrainConfig& cfg);

/// Same optimization on a precomputed feature matrix (rows aligned with `data`).
RrfTrainResult train_on_features(const FeatureBank& bank, const FeatureMatrix& features, const Dataset& data,
                                 LossKind loss, const TrainConfig& cfg);

}  // namespace rrf
