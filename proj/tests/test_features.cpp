#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rrf/errors.hpp"
#include "rrf/features.hpp"
#include "support.hpp"

using namespace rrf;

namespace {

FeatureSpec relu_spec(int d, int n, double gamma = 1.0, std::uint64_t seed = 1) {
    FeatureSpec s;
    s.kind = FeatureKind::relu;
    s.input_dim = d;
    s.count = n;
    s.bandwidth = gamma;
    s.seed = seed;
    return s;
}

FeatureSpec fourier_spec(int d, int n, double gamma = 1.0, std::uint64_t seed = 1) {
    FeatureSpec s = relu_spec(d, n, gamma, seed);
    s.kind = FeatureKind::fourier;
    s.distribution = Gaussian{1.0};
    return s;
}

}  // namespace

TEST_CASE("sphere rows are unit norm") {
    const Matrix w = sample_sphere(2, 1000, 7);
    CHECK(w.rows() == 1000);
    CHECK(w.cols() == 3);
    for (Eigen::Index i = 0; i < w.rows(); ++i) CHECK(std::abs(w.row(i).norm() - 1.0) <= 1e-12);
}

TEST_CASE("sphere mean vector concentrates") {
    // Each coordinate has variance 1/3 on S^2, so the mean's norm is about
    // sqrt(1/N) = 0.0032 at N = 1e5; 0.02 is a six-sigma margin.
    const Matrix w = sample_sphere(2, 100000, 11);
    CHECK(w.colwise().mean().norm() <= 0.02);
}

TEST_CASE("sampling is deterministic") {
    CHECK(sample_sphere(1, 4, 99) == sample_sphere(1, 4, 99));
    CHECK(sample_gaussian(3, 10, 2.0, 5) == sample_gaussian(3, 10, 2.0, 5));
    CHECK(sample_sphere(1, 4, 99) != sample_sphere(1, 4, 100));
    // Same seed, longer draw: the leading rows agree (blocked substreams).
    const Matrix a = sample_sphere(3, 300, 4);
    const Matrix b = sample_sphere(3, 700, 4);
    CHECK(a == b.topRows(300));
}

TEST_CASE("sampling rejects bad arguments") {
    CHECK_THROWS_AS(sample_sphere(0, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_sphere(2, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_gaussian(2, 5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_gaussian(2, 5, -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_ellipsoid({1.0, 0.0, 2.0}, 5, 1), std::invalid_argument);
}

TEST_CASE("gaussian entries have the requested variance") {
    // 2e5 entries: the sample variance has sd sqrt(2/2e5) = 0.0032, so the
    // [0.97, 1.03] window is more than nine sigma wide.
    const Matrix w = sample_gaussian(3, 50000, 1.0, 21);
    const double mean = w.mean();
    const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
    CHECK(var >= 0.97);
    CHECK(var <= 1.03);
    const Matrix w3 = sample_gaussian(3, 50000, 3.0, 21);
    CHECK(w3.array().square().mean() == doctest::Approx(9.0).epsilon(0.03));
}

TEST_CASE("ellipsoid rows stay on the stretched sphere") {
    const std::vector<double> axes{2.0, 0.5, 1.0};
    const Matrix w = sample_ellipsoid(axes, 500, 3);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        double q = 0.0;
        for (int j = 0; j < 3; ++j) q += std::pow(w(i, j) / axes[static_cast<std::size_t>(j)], 2);
        CHECK(q == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("feature spec validation") {
    FeatureSpec s = relu_spec(2, 3);
    CHECK_NOTHROW(s.validate());
    s.bandwidth = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = relu_spec(2, 0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = relu_spec(0, 3);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = relu_spec(2, 3);
    s.distribution = Ellipsoid{{1.0, 1.0}};  // needs d+1 = 3 axes
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.distribution = Ellipsoid{{1.0, -1.0, 1.0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("bank sampled from a spec is reproducible and unit norm") {
    const FeatureBank a = FeatureBank::sample(relu_spec(3, 50, 1.0, 8));
    const FeatureBank b = FeatureBank::sample(relu_spec(3, 50, 1.0, 8));
    CHECK(a.omegas() == b.omegas());
    CHECK(a.omegas().cols() == 4);
    CHECK(a.phases().size() == 0);
    for (Eigen::Index i = 0; i < a.omegas().rows(); ++i) CHECK(std::abs(a.omegas().row(i).norm() - 1.0) <= 1e-12);

    const FeatureBank f = FeatureBank::sample(fourier_spec(3, 50));
    CHECK(f.omegas().cols() == 3);
    CHECK(f.phases().size() == 50);
    CHECK(f.phases().minCoeff() >= 0.0);
    CHECK(f.phases().maxCoeff() < 2.0 * std::numbers::pi);
}

TEST_CASE("bank constructor checks shapes") {
    CHECK_THROWS_AS(FeatureBank(relu_spec(2, 2), Matrix::Ones(2, 2)), ShapeError);
    CHECK_THROWS_AS(FeatureBank(relu_spec(2, 2), Matrix::Ones(3, 3)), ShapeError);
    CHECK_THROWS_AS(FeatureBank(fourier_spec(2, 2), Matrix::Ones(2, 2)), ShapeError);  // phases missing
}

TEST_CASE("relu features on hand-built banks") {
    Matrix up(1, 3), down(1, 3);
    up << 0, 0, 1;
    down << 0, 0, -1;
    const Matrix origin = Matrix::Zero(1, 2);
    CHECK(relu_features(origin, FeatureBank(relu_spec(2, 1), up)).values(0, 0) == 1.0);
    CHECK(relu_features(origin, FeatureBank(relu_spec(2, 1), down)).values(0, 0) == 0.0);

    Matrix w(1, 3);
    w << 0.25, 0.5, 0.5;  // 0.25 * 0 + 0.5 * 0.5 + 0.5 / 2 = 0.5
    Matrix x(1, 2);
    x << 0.0, 0.5;
    CHECK(relu_features(x, FeatureBank(relu_spec(2, 1, 2.0), w)).values(0, 0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(relu_features(Matrix::Zero(1, 3), FeatureBank(relu_spec(2, 1), up)), ShapeError);
    CHECK_THROWS_AS(relu_features(origin, FeatureBank::sample(fourier_spec(2, 1))), std::invalid_argument);
}

TEST_CASE("fourier features on hand-built banks") {
    Matrix w(1, 1);
    w << 1.0;
    Vector zero_phase(1), quarter(1);
    zero_phase << 0.0;
    quarter << std::numbers::pi / 2;
    const Matrix x = Matrix::Zero(1, 1);
    CHECK(fourier_features(x, FeatureBank(fourier_spec(1, 1), w, zero_phase)).values(0, 0) ==
          doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(fourier_features(x, FeatureBank(fourier_spec(1, 1), w, quarter)).values(0, 0)) <= 1e-12);
    CHECK_THROWS_AS(fourier_features(Matrix::Zero(1, 2), FeatureBank(fourier_spec(1, 1), w, zero_phase)), ShapeError);
}

TEST_CASE("fourier values are bounded by sqrt 2") {
    const FeatureBank bank = FeatureBank::sample(fourier_spec(4, 200, 0.5, 3));
    const Matrix x = testing::uniform_box(100, 4, 3.0, 5);
    const Matrix phi = fourier_features(x, bank).values;
    CHECK(phi.maxCoeff() <= std::sqrt(2.0));
    CHECK(phi.minCoeff() >= -std::sqrt(2.0));
    CHECK(fourier_features(x, bank).zero_fraction() == 0.0);
}

TEST_CASE("fourier features estimate the gaussian kernel") {
    // Bochner: E[2 cos(w.x/g + b) cos(w.x'/g + b)] = exp(-|x - x'|^2 / (2 g^2)).
    // With N = 1e5 the estimator's sd is below 1/sqrt(N) = 0.0032.
    const double gamma = 1.5;
    const FeatureBank bank = FeatureBank::sample(fourier_spec(3, 100000, gamma, 17));
    Matrix x(2, 3);
    x << 0.3, -0.2, 0.9, -0.4, 0.5, 0.1;
    const Matrix phi = fourier_features(x, bank).values;
    const double estimate = phi.row(0).dot(phi.row(1)) / 100000.0;
    const double exact = std::exp(-(x.row(0) - x.row(1)).squaredNorm() / (2 * gamma * gamma));
    CHECK(std::abs(estimate - exact) <= 0.01);
}

TEST_CASE("relu features are nonnegative and degree-1 homogeneous in the weights") {
    const FeatureBank bank = FeatureBank::sample(relu_spec(3, 64, 0.7, 9));
    const Matrix x = testing::uniform_box(40, 3, 2.0, 10);
    const Matrix phi = relu_features(x, bank).values;
    CHECK(phi.minCoeff() >= 0.0);
    for (double c : {0.5, 3.0, 17.0}) {
        const FeatureBank scaled(bank.spec(), c * bank.omegas());
        const Matrix phi_c = relu_features(x, scaled).values;
        CHECK((phi_c - c * phi).cwiseAbs().maxCoeff() <= 1e-12 * c * (1.0 + phi.maxCoeff()));
    }
}

TEST_CASE("about half of relu features vanish on symmetric data") {
    const FeatureBank bank = FeatureBank::sample(relu_spec(2, 200, 1.0, 12));
    const Matrix x = testing::uniform_box(2000, 2, 1.0, 13);
    const double zeros = relu_features(x, bank).zero_fraction();
    CHECK(zeros >= 0.4);
    CHECK(zeros <= 0.6);
}

TEST_CASE("bank dump round trips") {
    for (const FeatureSpec& spec : {relu_spec(3, 7, 0.25, 77), fourier_spec(2, 5, 4.0, 78)}) {
        const FeatureBank bank = FeatureBank::sample(spec);
        std::stringstream buf;
        write_bank(bank, buf);
        const FeatureBank back = read_bank(buf);
        CHECK(back.omegas() == bank.omegas());
        CHECK(back.phases() == bank.phases());
        CHECK(back.spec().seed == spec.seed);
        CHECK(back.spec().bandwidth == spec.bandwidth);
        CHECK(back.spec().kind == spec.kind);
    }
    FeatureSpec ell = relu_spec(2, 4);
    ell.distribution = Ellipsoid{{1.0, 2.0, 0.5}};
    std::stringstream buf;
    write_bank(FeatureBank::sample(ell), buf);
    const FeatureBank back = read_bank(buf);
    REQUIRE(std::holds_alternative<Ellipsoid>(back.spec().distribution));
    CHECK(std::get<Ellipsoid>(back.spec().distribution).axes == std::vector<double>{1.0, 2.0, 0.5});

    std::stringstream bad("kind=relu,d=2,N=2,gamma=1,seed=0,distribution=uniform_sphere\n1,2,3\n");
    CHECK_THROWS(read_bank(bad));
}
