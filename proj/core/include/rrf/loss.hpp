#pragma once

#include <string>

#include "rrf/dataset.hpp"
#include "rrf/linalg.hpp"

namespace rrf {

enum class LossKind { hinge, logistic_multiclass, squared };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct LossValue {
    double loss = 0.0;
    Vector grad;  // d loss / d prediction
};

/// Loss and (sub)gradient for one prediction.
///   hinge:    max(0, 1 - y f), y in {-1, +1}; subgradient -y when y f < 1, else 0
///   logistic: softmax cross-entropy over the K logits, y a class index
///   squared:  (f - y)^2
/// Throws LabelError when the label does not fit the loss.
LossValue loss_and_grad(LossKind kind, const Vector& prediction, double label);

/// Batched form used by the trainers: fills `grad` (same shape as `predictions`)
/// with per-row gradients and returns the summed loss.
double batch_loss_and_grad(LossKind kind, const Matrix& predictions, const Vector& labels, Matrix& grad);

/// Label as the loss expects it: binary +-1 becomes a class index for the
/// logistic loss, everything else passes through.
double loss_label(LossKind kind, Task task, double label);

/// Number of model outputs the loss needs for this dataset.
int output_width(LossKind kind, const Dataset& data);

/// Accuracy for classification tasks, mean squared error for regression.
double task_metric(Task task, const Matrix& predictions, const Vector& labels);

}  // namespace rrf
