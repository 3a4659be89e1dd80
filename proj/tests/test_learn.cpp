#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gradcheck.hpp"
#include "rrf/dataset.hpp"
#include "rrf/dense_net.hpp"
#include "rrf/errors.hpp"
#include "rrf/random_feature_model.hpp"
#include "rrf/serialize.hpp"
#include "rrf/theory.hpp"
#include "support.hpp"

using namespace rrf;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// Two separated Gaussian blobs in the plane, labels -1 / +1.
Dataset blobs(int m, std::uint64_t seed) {
    rrf::Rng rng = make_rng(seed);
    std::normal_distribution<double> noise(0.0, 0.4);
    Matrix x(m, 2);
    Vector y(m);
    for (int i = 0; i < m; ++i) {
        const double label = i % 2 ? 1.0 : -1.0;
        x(i, 0) = 1.5 * label + noise(rng);
        x(i, 1) = noise(rng);
        y[i] = label;
    }
    return Dataset::make(std::move(x), std::move(y), Task::binary, "blobs");
}

FeatureSpec relu_spec(int d, int n, double gamma, std::uint64_t seed) {
    FeatureSpec s;
    s.input_dim = d;
    s.count = n;
    s.bandwidth = gamma;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("loss values") {
    auto hinge = loss_and_grad(LossKind::hinge, vec({0.0}), 1.0);
    CHECK(hinge.loss == 1.0);
    CHECK(hinge.grad[0] == -1.0);
    hinge = loss_and_grad(LossKind::hinge, vec({1.0}), 1.0);  // at the kink the subgradient is 0
    CHECK(hinge.loss == 0.0);
    CHECK(hinge.grad[0] == 0.0);
    hinge = loss_and_grad(LossKind::hinge, vec({0.5}), -1.0);
    CHECK(hinge.loss == 1.5);
    CHECK(hinge.grad[0] == 1.0);

    const auto sq = loss_and_grad(LossKind::squared, vec({2.5}), 2.5);
    CHECK(sq.loss == 0.0);
    CHECK(sq.grad[0] == 0.0);
    const auto sq2 = loss_and_grad(LossKind::squared, vec({1.0}), 3.0);
    CHECK(sq2.loss == 4.0);
    CHECK(sq2.grad[0] == -4.0);

    const auto lg = loss_and_grad(LossKind::logistic_multiclass, vec({0.0, 0.0}), 1.0);
    CHECK(lg.loss == doctest::Approx(std::numbers::ln2));
    CHECK(lg.grad[0] == doctest::Approx(0.5));
    CHECK(lg.grad[1] == doctest::Approx(-0.5));
    // Large logits stay finite.
    const auto big = loss_and_grad(LossKind::logistic_multiclass, vec({1000.0, -1000.0, 0.0}), 1.0);
    CHECK(big.loss == doctest::Approx(2000.0));
    CHECK(std::isfinite(big.grad.sum()));
}

TEST_CASE("loss label checks") {
    CHECK_THROWS_AS(loss_and_grad(LossKind::hinge, vec({0.0}), 0.0), LabelError);
    CHECK_THROWS_AS(loss_and_grad(LossKind::hinge, vec({0.0}), 2.0), LabelError);
    CHECK_THROWS_AS(loss_and_grad(LossKind::logistic_multiclass, vec({0.0, 0.0}), 2.0), LabelError);
    CHECK_THROWS_AS(loss_and_grad(LossKind::logistic_multiclass, vec({0.0, 0.0}), 0.5), LabelError);
    CHECK_THROWS_AS(loss_and_grad(LossKind::squared, vec({0.0}), std::nan("")), LabelError);
    CHECK_THROWS_AS(loss_and_grad(LossKind::squared, vec({0.0, 1.0}), 0.0), ShapeError);
    CHECK(loss_label(LossKind::logistic_multiclass, Task::binary, -1.0) == 0.0);
    CHECK(loss_label(LossKind::logistic_multiclass, Task::binary, 1.0) == 1.0);
    CHECK(loss_label(LossKind::hinge, Task::binary, -1.0) == -1.0);
}

TEST_CASE("loss gradients match finite differences") {
    rrf::Rng rng = make_rng(3);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int p = 0; p < 20; ++p) {
        double f = normal(rng);
        if (std::abs(std::abs(f) - 1.0) < 1e-3) f += 0.01;  // stay off the hinge kink
        CHECK(testing::loss_gradient_error(LossKind::hinge, vec({f}), p % 2 ? 1.0 : -1.0) <= 1e-5);
        CHECK(testing::loss_gradient_error(LossKind::squared, vec({f}), normal(rng)) <= 1e-5);
        Vector logits(4);
        for (int k = 0; k < 4; ++k) logits[k] = normal(rng);
        CHECK(testing::loss_gradient_error(LossKind::logistic_multiclass, logits, p % 4) <= 1e-5);
    }
}

TEST_CASE("projection onto the ball") {
    Matrix c(2, 2);
    c << 3, 0, 0, 4;  // norm 5
    CHECK(project_ball(c, 2.5).norm() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(project_ball(c, 10.0) == c);
    CHECK(project_ball(Matrix::Zero(3, 1), 1.0) == Matrix::Zero(3, 1));
    CHECK(project_ball(c, 5.0) == c);
}

TEST_CASE("train_rrf separates blobs") {
    const Dataset data = blobs(500, 1);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.05;
    cfg.radius = 1e3;
    cfg.seed = 2;
    const FeatureSpec spec = relu_spec(2, 50, 1.0, 3);
    const auto res = train_rrf(data, spec, LossKind::hinge, cfg);
    CHECK(task_metric(Task::binary, res.model.predict(data.x), data.y) >= 0.99);
    CHECK(res.trace.size() == 50);
    CHECK(res.train_seconds >= 0.0);
    // Features are sampled once from the spec and never touched by training.
    CHECK(res.model.bank.omegas() == FeatureBank::sample(spec).omegas());
    // Same inputs, same model.
    CHECK(train_rrf(data, spec, LossKind::hinge, cfg).model.outer == res.model.outer);
}

TEST_CASE("a binding radius pins the solution to the constrained optimum") {
    // With |C| <= 1e-4 every margin is far below 1, the hinge objective is linear
    // in C, and its minimizer over the ball is R g / |g| with g = sum_i y_i phi_i.
    const Dataset data = blobs(500, 1);
    const FeatureSpec spec = relu_spec(2, 50, 1.0, 3);
    const FeatureBank bank = FeatureBank::sample(spec);
    const FeatureMatrix phi = compute_features(data.x, bank);
    const Vector g = phi.values.transpose() * data.y;
    const Vector optimum = 1e-4 * g / g.norm();

    // Full-batch steps: with a minibatch the iterate would track the direction
    // of the last batch's gradient instead.
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = data.size();
    cfg.learning_rate = 0.05;
    cfg.radius = 1e-4;
    const auto res = train_on_features(bank, phi, data, LossKind::hinge, cfg);
    const Vector c = res.model.outer.col(0);
    CHECK(c.norm() == doctest::Approx(1e-4).epsilon(1e-9));
    CHECK(c.dot(optimum) / (c.norm() * optimum.norm()) >= 0.999);
    for (const auto& row : res.trace) CHECK(row.outer_norm <= 1e-4 + 1e-9);
    // The loss cannot fall below 1 - R max|phi| anywhere on the ball.
    CHECK(res.trace.back().loss >= 1.0 - 1e-4 * phi.values.rowwise().norm().maxCoeff());
}

TEST_CASE("training errors and degenerate configs") {
    const Dataset data = blobs(40, 4);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.learning_rate = 0.0;
    const auto frozen = train_rrf(data, relu_spec(2, 10, 1.0, 1), LossKind::hinge, cfg);
    CHECK(frozen.model.outer.isZero(0.0));

    cfg.learning_rate = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.learning_rate = 0.1;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    // Squared loss with an absurd rate and no effective radius diverges.
    Dataset reg = data;
    reg.task = Task::regression;
    TrainConfig wild;
    wild.learning_rate = 1e200;
    wild.radius = 1e300;
    wild.epochs = 5;
    CHECK_THROWS_AS(train_rrf(reg, relu_spec(2, 10, 1.0, 1), LossKind::squared, wild), TrainingError);
}

TEST_CASE("training trace csv") {
    std::ostringstream out;
    write_trace_csv({{1, 0.5, 0.9, 1.0}, {2, 0.25, 0.95, 1.0}}, out);
    CHECK(out.str() == "epoch,loss,metric\n1,0.5,0.9\n2,0.25,0.95\n");
}

TEST_CASE("dense forward basics") {
    DenseNet zero({Matrix::Zero(4, 3), Matrix::Zero(1, 4)}, {Vector::Zero(4), Vector::Zero(1)});
    CHECK(dense_forward(zero, testing::uniform_box(5, 3, 1.0, 1)).isZero(0.0));

    // One path: relu(x1) passed through unchanged.
    Matrix w1 = Matrix::Zero(1, 2), w2 = Matrix::Ones(1, 1);
    w1(0, 0) = 1.0;
    DenseNet path({w1, w2}, {Vector::Zero(1), Vector::Zero(1)});
    Matrix x(3, 2);
    x << -2, 5, 0.5, 1, 3, -1;
    const Matrix y = dense_forward(path, x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(1, 0) == 0.5);
    CHECK(y(2, 0) == 3.0);

    CHECK_THROWS_AS(dense_forward(path, Matrix::Zero(2, 3)), ShapeError);
    CHECK_THROWS(DenseNet({Matrix::Ones(1, 1)}, {Vector::Zero(1)}));  // depth 1
    CHECK_THROWS(DenseNet({Matrix::Ones(2, 3), Matrix::Ones(1, 3)}, {Vector::Zero(2), Vector::Zero(1)}));
}

TEST_CASE("depth-2 net reproduces a random feature model") {
    const Dataset data = blobs(100, 5);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.learning_rate = 0.1;
    const auto model = train_rrf(data, relu_spec(2, 30, 0.5, 6), LossKind::hinge, cfg).model;
    const DenseNet net = dense_from_rrf(model);
    CHECK(net.parameter_count() == 30 * (2 + 2) + 1);
    CHECK((dense_forward(net, data.x) - model.predict(data.x)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dense gradients match finite differences") {
    const Matrix x = testing::uniform_box(16, 3, 1.0, 7);
    Vector reg(16), cls(16);
    for (int i = 0; i < 16; ++i) {
        reg[i] = std::sin(3 * x(i, 0));
        cls[i] = i % 3;
    }
    Vector pm = reg.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    for (int depth : {2, 3}) {
        std::vector<int> hidden(static_cast<std::size_t>(depth - 1), 6);
        const DenseNet sq = DenseNet::init(3, hidden, 1, 10 + static_cast<std::uint64_t>(depth));
        CHECK(testing::dense_gradient_error(sq, x, reg, LossKind::squared, 20, 1) <= 1e-5);
        CHECK(testing::dense_gradient_error(sq, x, pm, LossKind::hinge, 20, 2) <= 1e-5);
        const DenseNet lg = DenseNet::init(3, hidden, 3, 20 + static_cast<std::uint64_t>(depth));
        CHECK(testing::dense_gradient_error(lg, x, cls, LossKind::logistic_multiclass, 20, 3) <= 1e-5);
    }
}

TEST_CASE("glorot init bounds") {
    const DenseNet net = DenseNet::init(4, {10, 6}, 2, 3);
    CHECK(net.depth() == 3);
    CHECK(net.parameter_count() == 5 * 10 + 11 * 6 + 7 * 2);
    CHECK(net.weights()[0].cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 14));
    CHECK(net.weights()[1].cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16));
    CHECK(net.biases()[0].isZero(0.0));
    CHECK(DenseNet::init(4, {10, 6}, 2, 3).weights()[1] == net.weights()[1]);
}

TEST_CASE("dense training fits a line") {
    // y = 2x on [-1, 1]; a width-8 ReLU net represents it exactly.
    const Matrix x = testing::uniform_box(256, 1, 1.0, 8);
    const Dataset data = Dataset::make(x, 2.0 * x.col(0), Task::regression, "line");
    TrainConfig cfg;
    cfg.optimizer = Optimizer::adam;
    cfg.learning_rate = 0.01;
    cfg.epochs = 200;
    cfg.batch_size = 32;
    cfg.seed = 1;
    const auto res = dense_train(DenseNet::init(1, {8}, 1, 2), data, LossKind::squared, cfg);
    CHECK(res.trace.back().metric <= 1e-3);
    CHECK(task_metric(Task::regression, dense_forward(res.net, x), data.y) == doctest::Approx(res.trace.back().metric));
}

TEST_CASE("zero learning rate leaves a dense net unchanged") {
    const Matrix x = testing::uniform_box(50, 2, 1.0, 9);
    const Dataset data = Dataset::make(x, x.col(0), Task::regression);
    const DenseNet net = DenseNet::init(2, {5, 5}, 1, 4);
    for (Optimizer opt : {Optimizer::adam, Optimizer::sgd_projected}) {
        TrainConfig cfg;
        cfg.optimizer = opt;
        cfg.learning_rate = 0.0;
        cfg.epochs = 2;
        const auto res = dense_train(net, data, LossKind::squared, cfg);
        for (int l = 0; l < 3; ++l) {
            CHECK(res.net.weights()[static_cast<std::size_t>(l)] == net.weights()[static_cast<std::size_t>(l)]);
            CHECK(res.net.biases()[static_cast<std::size_t>(l)] == net.biases()[static_cast<std::size_t>(l)]);
        }
    }
}

TEST_CASE("matched 3-layer width") {
    CHECK(shallow_parameter_count(20, 4) == 120);
    CHECK(matched_width_3layer(120, 4) == 7);
    CHECK(matched_width_3layer(99, 4) == 7);
    CHECK(matched_width_3layer(98, 4) == 6);
    CHECK_THROWS_AS(matched_width_3layer(4 + 1 + 2 + 2 - 1, 4), std::invalid_argument);
    CHECK(matched_width_3layer(4 + 1 + 2 + 2, 4) == 1);
    int prev = 0;
    for (long budget = 20; budget < 200000; budget *= 2) {
        const int w = matched_width_3layer(budget, 3);
        CHECK(w >= prev);
        const long params = 4L * w + (w + 1L) * w + (w + 1L);
        CHECK(params <= budget);
        CHECK(4L * (w + 1) + (w + 2L) * (w + 1) + (w + 2L) > budget);
        prev = w;
    }
}

TEST_CASE("theory counts") {
    const auto c = theory_counts(1.0, 1.0, 0.5, 0.1);
    CHECK(c.samples == 1603);
    CHECK(c.features == 287);
    const auto half = theory_counts(1.0, 1.0, 0.25, 0.1);
    CHECK(static_cast<double>(half.samples) / c.samples == doctest::Approx(4.0).epsilon(0.01));
    CHECK_THROWS_AS(theory_counts(1.0, 1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(theory_counts(0.0, 1.0, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("model checkpoints round trip") {
    const Dataset data = blobs(60, 11);
    TrainConfig cfg;
    cfg.epochs = 2;
    const auto model = train_rrf(data, relu_spec(2, 8, 0.5, 12), LossKind::hinge, cfg).model;
    const RandomFeatureModel back = random_feature_model_from_json(to_json(model));
    CHECK(back.outer == model.outer);
    CHECK(back.bank.omegas() == model.bank.omegas());
    CHECK(back.radius == model.radius);
    CHECK(back.predict(data.x) == model.predict(data.x));

    const DenseNet net = DenseNet::init(3, {4, 5}, 2, 9);
    const DenseNet net_back = dense_net_from_json(to_json(net));
    for (int l = 0; l < 3; ++l) {
        CHECK(net_back.weights()[static_cast<std::size_t>(l)] == net.weights()[static_cast<std::size_t>(l)]);
        CHECK(net_back.biases()[static_cast<std::size_t>(l)] == net.biases()[static_cast<std::size_t>(l)]);
    }
    CHECK_THROWS(dense_net_from_json("{\"kind\": \"dense\", \"layers\": [{\"rows\": 2, \"cols\": 2, \"weights\": [1]}]}"));
}
