#include "rrf/random_feature_model.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rrf/errors.hpp"
#include "rrf/random.hpp"

namespace rrf {

Matrix RandomFeatureModel::predict(const Matrix& x) const { return predict(compute_features(x, bank)); }

Matrix RandomFeatureModel::predict(const FeatureMatrix& features) const {
    if (features.values.cols() != outer.rows()) throw ShapeError("feature width does not match outer weights");
    return features.values * outer;
}

Matrix project_ball(const Matrix& outer, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("projection radius must be > 0");
    const double norm = outer.stableNorm();  // norm() overflows to inf for huge entries
    if (norm <= radius) return outer;
    return outer * (radius / norm);
}

RrfTrainResult train_rrf(const Dataset& data, const FeatureSpec& spec, LossKind loss, const TrainConfig& cfg) {
    if (spec.input_dim != data.dim()) throw ShapeError("feature spec input_dim does not match the data");
    FeatureBank bank = FeatureBank::sample(spec);
    const FeatureMatrix features = compute_features(data.x, bank);
    return train_on_features(bank, features, data, loss, cfg);
}

RrfTrainResult train_on_features(const FeatureBank& bank, const FeatureMatrix& features, const Dataset& data,
                                 LossKind loss, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    const Matrix& phi = features.values;
    if (phi.rows() != data.size() || phi.cols() != bank.count()) throw ShapeError("feature matrix shape mismatch");

    const auto m = static_cast<std::size_t>(data.size());
    const int outputs = output_width(loss, data);
    Vector labels(data.y.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) labels[i] = loss_label(loss, data.task, data.y[i]);

    const auto start = std::chrono::steady_clock::now();
    Matrix outer = Matrix::Zero(bank.count(), outputs);
    AdamState adam(outer.rows(), outer.cols());
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(cfg.seed, 0x5eed);

    RrfTrainResult result{RandomFeatureModel{bank, outer, cfg.radius}, {}, 0.0};
    Matrix batch_phi, batch_pred, grad;
    Vector batch_labels;
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double rate = cfg.rate_at(epoch);
        for (std::size_t begin = 0; begin < m; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(m, begin + static_cast<std::size_t>(cfg.batch_size));
            const auto b = static_cast<Eigen::Index>(end - begin);
            batch_phi.resize(b, phi.cols());
            batch_labels.resize(b);
            for (Eigen::Index i = 0; i < b; ++i) {
                const auto row = static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(i)]);
                batch_phi.row(i) = phi.row(row);
                batch_labels[i] = labels[row];
            }
            batch_pred.noalias() = batch_phi * outer;
            const double batch_loss = batch_loss_and_grad(loss, batch_pred, batch_labels, grad);
            ++step;
            if (!std::isfinite(batch_loss)) throw TrainingError("non-finite training loss", static_cast<std::size_t>(step));
            const Matrix step_grad = batch_phi.transpose() * grad / static_cast<double>(b);
            if (cfg.optimizer == Optimizer::adam) {
                adam.apply(outer, step_grad, rate, step);
            } else {
                outer -= rate * step_grad;
            }
            outer = project_ball(outer, cfg.radius);
            assert(outer.stableNorm() <= cfg.radius + 1e-9);
        }
        const Matrix pred = phi * outer;
        Matrix full_grad;
        const double total = batch_loss_and_grad(loss, pred, labels, full_grad);
        if (!std::isfinite(total)) throw TrainingError("non-finite training loss", static_cast<std::size_t>(step));
        result.trace.push_back({epoch + 1, total / static_cast<double>(m), task_metric(data.task, pred, data.y),
                                outer.stableNorm()});
    }
    result.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.model.outer = std::move(outer);
    return result;
}

}  // namespace rrf
