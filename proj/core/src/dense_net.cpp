#include "rrf/dense_net.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rrf/errors.hpp"
#include "rrf/random.hpp"

namespace rrf {

DenseNet::DenseNet(std::vector<Matrix> weights, std::vector<Vector> biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
    if (weights_.size() < 2 || weights_.size() > 3) throw std::invalid_argument("dense nets have depth 2 or 3");
    if (biases_.size() != weights_.size()) throw ShapeError("one bias vector per weight matrix");
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (biases_[l].size() != weights_[l].rows()) throw ShapeError("bias length must match layer width");
        if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) throw ShapeError("layer widths do not chain");
    }
}

DenseNet DenseNet::init(int input_dim, const std::vector<int>& hidden, int outputs, std::uint64_t seed) {
    if (input_dim < 1 || outputs < 1) throw std::invalid_argument("dimensions must be >= 1");
    std::vector<int> widths{input_dim};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(outputs);
    Rng rng = make_rng(seed);
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (widths[l + 1] < 1) throw std::invalid_argument("hidden widths must be >= 1");
        const double limit = std::sqrt(6.0 / (widths[l] + widths[l + 1]));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        Matrix w(widths[l + 1], widths[l]);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform(rng);
        weights.push_back(std::move(w));
        biases.push_back(Vector::Zero(widths[l + 1]));
    }
    return DenseNet(std::move(weights), std::move(biases));
}

long DenseNet::parameter_count() const {
    long total = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) total += static_cast<long>(weights_[l].size() + biases_[l].size());
    return total;
}

Matrix dense_forward(const DenseNet& net, const Matrix& x) {
    if (x.cols() != net.input_dim()) throw ShapeError("input width does not match the network");
    // Row blocks keep the hidden activations small for wide layers.
    constexpr Eigen::Index kBlock = 512;
    Matrix out(x.rows(), net.output_dim());
    // One buffer per layer so that no block reallocates a wide activation.
    std::vector<Matrix> acts(static_cast<std::size_t>(net.depth()));
    for (Eigen::Index begin = 0; begin < x.rows(); begin += kBlock) {
        const Eigen::Index rows = std::min(kBlock, x.rows() - begin);
        for (int l = 0; l < net.depth(); ++l) {
            const auto ul = static_cast<std::size_t>(l);
            Matrix& z = acts[ul];
            if (l == 0) {
                z.noalias() = x.middleRows(begin, rows) * net.weights()[0].transpose();
            } else {
                z.noalias() = acts[ul - 1] * net.weights()[ul].transpose();
            }
            z.rowwise() += net.biases()[ul].transpose();
            if (l + 1 < net.depth()) z = z.cwiseMax(0.0);
        }
        out.middleRows(begin, rows) = acts.back();
    }
    return out;
}

namespace {

// Buffers reused across minibatches; reallocating wide activations every step
// makes glibc return and re-fault the pages, which dominates run time.
struct Workspace {
    std::vector<Matrix> acts;  // acts[l] is the input of layer l; acts[depth] is the output
    Matrix delta, back;
};

double loss_and_grad_into(const DenseNet& net, const Matrix& x, const Vector& labels, LossKind loss,
                          DenseGradients* grads, Workspace& ws) {
    if (x.cols() != net.input_dim()) throw ShapeError("input width does not match the network");
    const int depth = net.depth();
    auto& acts = ws.acts;
    acts.resize(static_cast<std::size_t>(depth) + 1);
    acts[0] = x;
    for (int l = 0; l < depth; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        Matrix& z = acts[ul + 1];
        z.noalias() = acts[ul] * net.weights()[ul].transpose();
        z.rowwise() += net.biases()[ul].transpose();
        if (l + 1 < depth) z = z.cwiseMax(0.0);
    }
    Matrix& delta = ws.delta;
    const double total = batch_loss_and_grad(loss, acts.back(), labels, delta);
    const double scale = 1.0 / static_cast<double>(x.rows());
    if (grads) {
        grads->weights.resize(static_cast<std::size_t>(depth));
        grads->biases.resize(static_cast<std::size_t>(depth));
        delta *= scale;
        for (int l = depth - 1; l >= 0; --l) {
            const auto ul = static_cast<std::size_t>(l);
            grads->weights[ul].noalias() = delta.transpose() * acts[ul];
            grads->biases[ul] = delta.colwise().sum().transpose();
            if (l > 0) {
                ws.back.noalias() = delta * net.weights()[ul];
                delta = ws.back.cwiseProduct((acts[ul].array() > 0.0).cast<double>().matrix());
            }
        }
    }
    return total * scale;
}

}  // namespace

double dense_loss_and_grad(const DenseNet& net, const Matrix& x, const Vector& labels, LossKind loss,
                           DenseGradients* grads) {
    Workspace ws;
    return loss_and_grad_into(net, x, labels, loss, grads, ws);
}

DenseTrainResult dense_train(DenseNet net, const Dataset& data, LossKind loss, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (net.input_dim() != data.dim()) throw ShapeError("network input width does not match the data");
    if (net.output_dim() != output_width(loss, data)) throw ShapeError("network output width does not fit the loss");

    const auto m = static_cast<std::size_t>(data.size());
    Vector labels(data.y.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) labels[i] = loss_label(loss, data.task, data.y[i]);

    const auto start = std::chrono::steady_clock::now();
    std::vector<AdamState> w_state, b_state;
    for (int l = 0; l < net.depth(); ++l) {
        const auto ul = static_cast<std::size_t>(l);
        w_state.emplace_back(net.weights()[ul].rows(), net.weights()[ul].cols());
        b_state.emplace_back(net.biases()[ul].size(), 1);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(cfg.seed, 0x5eed);

    DenseTrainResult result{net, {}, 0.0};
    DenseGradients grads;
    Workspace ws;
    Matrix batch_x;
    Vector batch_labels;
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double rate = cfg.rate_at(epoch);
        for (std::size_t begin = 0; begin < m; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(m, begin + static_cast<std::size_t>(cfg.batch_size));
            const auto b = static_cast<Eigen::Index>(end - begin);
            batch_x.resize(b, data.dim());
            batch_labels.resize(b);
            for (Eigen::Index i = 0; i < b; ++i) {
                const auto row = static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(i)]);
                batch_x.row(i) = data.x.row(row);
                batch_labels[i] = labels[row];
            }
            const double batch_loss = loss_and_grad_into(net, batch_x, batch_labels, loss, &grads, ws);
            ++step;
            if (!std::isfinite(batch_loss)) throw TrainingError("non-finite training loss", static_cast<std::size_t>(step));
            for (int l = 0; l < net.depth(); ++l) {
                const auto ul = static_cast<std::size_t>(l);
                if (cfg.optimizer == Optimizer::adam) {
                    w_state[ul].apply(net.weights()[ul], grads.weights[ul], rate, step);
                    b_state[ul].apply(net.biases()[ul], grads.biases[ul], rate, step);
                } else {
                    net.weights()[ul] -= rate * grads.weights[ul];
                    net.biases()[ul] -= rate * grads.biases[ul];
                }
            }
        }
        const Matrix pred = dense_forward(net, data.x);
        Matrix unused;
        const double total = batch_loss_and_grad(loss, pred, labels, unused) / static_cast<double>(m);
        if (!std::isfinite(total)) throw TrainingError("non-finite training loss", static_cast<std::size_t>(step));
        result.trace.push_back({epoch + 1, total, task_metric(data.task, pred, data.y), 0.0});
    }
    result.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.net = std::move(net);
    return result;
}

DenseNet dense_from_rrf(const RandomFeatureModel& model) {
    const auto& bank = model.bank;
    if (bank.spec().kind != FeatureKind::relu) throw std::invalid_argument("only relu models map to dense nets");
    const int d = bank.input_dim();
    std::vector<Matrix> weights{bank.omegas().leftCols(d), model.outer.transpose()};
    std::vector<Vector> biases{bank.omegas().col(d) / bank.spec().bandwidth, Vector::Zero(model.outer.cols())};
    return DenseNet(std::move(weights), std::move(biases));
}

long shallow_parameter_count(long features, int d) { return features * (d + 2); }

int matched_width_3layer(long budget, int d) {
    if (d < 1) throw std::invalid_argument("input dimension must be >= 1");
    auto params = [d](long w) { return (d + 1) * w + (w + 1) * w + (w + 1); };
    if (budget < params(1)) {
        throw std::invalid_argument("budget " + std::to_string(budget) + " is below the smallest 3-layer net (" +
                                    std::to_string(params(1)) + ")");
    }
    long w = 1;
    while (params(w + 1) <= budget) ++w;
    return static_cast<int>(w);
}

}  // namespace rrf
