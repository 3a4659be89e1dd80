#pragma once

#include <cstdint>
#include <vector>

#include "rrf/dataset.hpp"
#include "rrf/loss.hpp"
#include "rrf/optim.hpp"
#include "rrf/random_feature_model.hpp"

namespace rrf {

/// Fully connected network with ReLU hidden layers and a linear output.
/// depth counts weight layers: 2 (one hidden layer) or 3 (two hidden layers).
class DenseNet {
public:
    DenseNet(std::vector<Matrix> weights, std::vector<Vector> biases);

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static DenseNet init(int input_dim, const std::vector<int>& hidden, int outputs, std::uint64_t seed);

    int depth() const { return static_cast<int>(weights_.size()); }
    int input_dim() const { return static_cast<int>(weights_.front().cols()); }
    int output_dim() const { return static_cast<int>(weights_.back().rows()); }
    long parameter_count() const;

    const std::vector<Matrix>& weights() const { return weights_; }
    const std::vector<Vector>& biases() const { return biases_; }
    std::vector<Matrix>& weights() { return weights_; }
    std::vector<Vector>& biases() { return biases_; }

private:
    std::vector<Matrix> weights_;  // out x in
    std::vector<Vector> biases_;
};

Matrix dense_forward(const DenseNet& net, const Matrix& x);

struct DenseGradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

/// Mean loss over the rows of x; fills `grads` by backpropagation when non-null.
/// Labels must already be in the loss's form (see loss_label).
double dense_loss_and_grad(const DenseNet& net, const Matrix& x, const Vector& labels, LossKind loss,
                           DenseGradients* grads);

struct DenseTrainResult {
    DenseNet net;
    std::vector<TraceRow> trace;
    double train_seconds = 0.0;
};

/// Minibatch training with Adam (cfg.optimizer == adam) or plain SGD.
DenseTrainResult dense_train(DenseNet net, const Dataset& data, LossKind loss, const TrainConfig& cfg);

/// The depth-2 network computing the same function as a ReLU random-feature model.
DenseNet dense_from_rrf(const RandomFeatureModel& model);

/// Parameters of a random-feature model with N features on d inputs: N (d + 2).
long shallow_parameter_count(long features, int d);

/// Largest equal width w with (d+1) w + (w+1) w + (w+1) <= budget.
int matched_width_3layer(long budget, int d);

}  // namespace rrf
