#include "rrf/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "rrf/errors.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

void check_label(LossKind kind, double label, Eigen::Index width) {
    switch (kind) {
        case LossKind::hinge:
            if (label != 1.0 && label != -1.0) {
                throw LabelError("hinge loss needs labels -1/+1, got " + text::format_double(label));
            }
            break;
        case LossKind::logistic_multiclass:
            if (!(label >= 0.0 && label < static_cast<double>(width) && label == std::floor(label))) {
                throw LabelError("logistic loss needs a class index below " + std::to_string(width) + ", got " +
                                 text::format_double(label));
            }
            break;
        case LossKind::squared:
            if (!std::isfinite(label)) throw LabelError("squared loss needs a finite label");
            break;
    }
}

// Loss of one row; writes the gradient into `grad`.
template <typename In, typename Out>
double row_loss(LossKind kind, const In& f, double y, Out grad) {
    switch (kind) {
        case LossKind::hinge: {
            const double margin = y * f[0];
            grad[0] = margin < 1.0 ? -y : 0.0;
            return std::max(0.0, 1.0 - margin);
        }
        case LossKind::logistic_multiclass: {
            const double top = f.maxCoeff();
            double total = 0.0;
            for (Eigen::Index k = 0; k < f.size(); ++k) {
                grad[k] = std::exp(f[k] - top);
                total += grad[k];
            }
            const auto cls = static_cast<Eigen::Index>(y);
            for (Eigen::Index k = 0; k < f.size(); ++k) grad[k] /= total;
            grad[cls] -= 1.0;
            return std::log(total) + top - f[cls];
        }
        case LossKind::squared: {
            const double r = f[0] - y;
            grad[0] = 2.0 * r;
            return r * r;
        }
    }
    return 0.0;
}

}  // namespace

const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::hinge: return "hinge";
        case LossKind::logistic_multiclass: return "logistic";
        case LossKind::squared: return "squared";
    }
    return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "hinge") return LossKind::hinge;
    if (name == "logistic" || name == "logistic_multiclass") return LossKind::logistic_multiclass;
    if (name == "squared") return LossKind::squared;
    throw std::invalid_argument("unknown loss '" + name + "'");
}

LossValue loss_and_grad(LossKind kind, const Vector& prediction, double label) {
    if (prediction.size() < 1) throw ShapeError("prediction must be nonempty");
    if (kind != LossKind::logistic_multiclass && prediction.size() != 1) {
        throw ShapeError(std::string(to_string(kind)) + " loss takes a scalar prediction");
    }
    check_label(kind, label, prediction.size());
    LossValue out{0.0, Vector(prediction.size())};
    out.loss = row_loss(kind, prediction, label, Eigen::Ref<Vector>(out.grad));
    return out;
}

double batch_loss_and_grad(LossKind kind, const Matrix& predictions, const Vector& labels, Matrix& grad) {
    if (labels.size() != predictions.rows()) throw ShapeError("one label per prediction row");
    grad.resize(predictions.rows(), predictions.cols());
    double total = 0.0;
    for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
        check_label(kind, labels[i], predictions.cols());
        total += row_loss(kind, predictions.row(i), labels[i], grad.row(i));
    }
    return total;
}

double loss_label(LossKind kind, Task task, double label) {
    if (kind == LossKind::logistic_multiclass && task == Task::binary) return label > 0.0 ? 1.0 : 0.0;
    return label;
}

int output_width(LossKind kind, const Dataset& data) {
    if (kind == LossKind::logistic_multiclass) return std::max(2, data.num_classes());
    return 1;
}

double task_metric(Task task, const Matrix& predictions, const Vector& labels) {
    const auto m = predictions.rows();
    if (m == 0) return 0.0;
    if (task == Task::regression) {
        return (predictions.col(0) - labels).squaredNorm() / static_cast<double>(m);
    }
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        double predicted = 0.0;
        if (predictions.cols() == 1) {
            predicted = predictions(i, 0) >= 0.0 ? 1.0 : -1.0;
        } else {
            Eigen::Index best = 0;
            predictions.row(i).maxCoeff(&best);
            predicted = task == Task::binary ? (best == 1 ? 1.0 : -1.0) : static_cast<double>(best);
        }
        hits += predicted == labels[i];
    }
    return static_cast<double>(hits) / static_cast<double>(m);
}

}  // namespace rrf
