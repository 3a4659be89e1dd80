#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rrf/dataset.hpp"
#include "rrf/errors.hpp"
#include "rrf/libsvm.hpp"
#include "rrf/split.hpp"

using namespace rrf;

TEST_CASE("daniely generator") {
    const Dataset data = gen_daniely(2, 2000, 3);
    CHECK(data.dim() == 4);
    CHECK(data.task == Task::regression);
    CHECK(std::abs(data.radius - std::sqrt(2.0)) <= 1e-12);
    for (int i = 0; i < data.size(); ++i) {
        const auto u = data.x.row(i).head(2), v = data.x.row(i).tail(2);
        CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
        CHECK(data.y[i] == doctest::Approx(std::sin(8 * std::numbers::pi * u.dot(v))).epsilon(1e-14));
    }
    CHECK(gen_daniely(3, 10, 5).dim() == 6);
    CHECK(gen_daniely(2, 50, 9).x == gen_daniely(2, 50, 9).x);
    CHECK_THROWS_AS(gen_daniely(1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_daniely(2, 0, 1), std::invalid_argument);
}

TEST_CASE("daniely label arithmetic") {
    CHECK(std::abs(std::sin(8 * std::numbers::pi * 1.0)) <= 1e-14);
    CHECK(std::sin(8 * std::numbers::pi / 32) == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("daniely label variance") {
    // For d = 2, u.v = cos(t) with t uniform, and E sin^2(8 pi cos t) = 0.460311...
    // (numerical quadrature); 1e5 samples put the estimate within about 0.003.
    const Dataset data = gen_daniely(2, 100000, 4);
    const double mean = data.y.mean();
    const double var = (data.y.array() - mean).square().mean();
    CHECK(var >= 0.45);
    CHECK(var <= 0.55);
    CHECK(var == doctest::Approx(0.460311294348195).epsilon(0.02));
}

TEST_CASE("grid2d margins") {
    CHECK(grid2d_margin(Grid2dKind::sine, 0.0, 1.0) > 0.0);
    CHECK(grid2d_margin(Grid2dKind::square, 0.0, 0.0) > 0.0);
    CHECK(grid2d_margin(Grid2dKind::square, 0.9, 0.9) < 0.0);
    CHECK(grid2d_margin(Grid2dKind::strips, 0.1, 0.7) > 0.0);
    CHECK(grid2d_margin(Grid2dKind::strips, -0.1, 0.7) < 0.0);
    CHECK(grid2d_margin(Grid2dKind::checkboard, 0.1, 0.1) > 0.0);
    CHECK(grid2d_margin(Grid2dKind::checkboard, 0.1, -0.1) < 0.0);
    CHECK_THROWS_AS(grid2d_kind_from_string("spiral"), std::invalid_argument);
}

TEST_CASE("grid2d datasets") {
    for (auto kind : {Grid2dKind::sine, Grid2dKind::strips, Grid2dKind::square, Grid2dKind::checkboard}) {
        const Dataset data = gen_grid2d(kind, 3000, 8);
        CHECK(data.task == Task::binary);
        CHECK(data.name == to_string(kind));
        CHECK(data.x.cwiseAbs().maxCoeff() <= 1.0);
        for (int i = 0; i < data.size(); ++i) {
            const double margin = grid2d_margin(kind, data.x(i, 0), data.x(i, 1));
            CHECK(std::abs(margin) >= 1e-12);
            CHECK(data.y[i] == (margin > 0 ? 1.0 : -1.0));
        }
        CHECK(gen_grid2d(kind, 100, 1).x == gen_grid2d(kind, 100, 1).x);
    }
}

TEST_CASE("checkboard is balanced") {
    const Dataset data = gen_grid2d(Grid2dKind::checkboard, 100000, 2);
    const double positive = (data.y.array() > 0).cast<double>().mean();
    CHECK(positive >= 0.45);
    CHECK(positive <= 0.55);
}

TEST_CASE("radial generator") {
    RadialDensity density{{0.0, 1.0, 2.0}, {0.0, 1.0}};  // all mass on [1, 2)
    const Dataset data = gen_radial(4, 500, density, [](double r) { return r < 1.5 ? 1.0 : -1.0; }, Task::binary, 3);
    const Vector norms = data.x.rowwise().norm();
    CHECK(norms.minCoeff() >= 1.0);
    CHECK(norms.maxCoeff() < 2.0);
    for (int i = 0; i < data.size(); ++i) CHECK(data.y[i] == (norms[i] < 1.5 ? 1.0 : -1.0));
    CHECK_THROWS_AS(gen_radial(2, 5, {{0.0, 1.0}, {1.0, 1.0}}, [](double) { return 0.0; }, Task::regression, 1),
                    std::invalid_argument);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset::make(Matrix::Zero(0, 2), Vector(0), Task::regression), std::invalid_argument);
    CHECK_THROWS_AS(Dataset::make(Matrix::Zero(2, 2), Vector::Zero(3), Task::regression), ShapeError);
    CHECK_THROWS_AS(Dataset::make(Matrix::Zero(2, 2), Vector::Zero(2), Task::binary), LabelError);
    Vector labels(3);
    labels << 0, 2, 1.5;
    CHECK_THROWS_AS(Dataset::make(Matrix::Zero(3, 2), labels, Task::multiclass), LabelError);
    labels << 0, 2, 1;
    CHECK(Dataset::make(Matrix::Zero(3, 2), labels, Task::multiclass).num_classes() == 3);
}

TEST_CASE("libsvm parsing") {
    std::istringstream one("1 1:0.5 3:-2\n");
    const Dataset a = parse_libsvm(one, {3, std::nullopt});
    REQUIRE(a.size() == 1);
    CHECK(a.dim() == 3);
    CHECK(a.x(0, 0) == 0.5);
    CHECK(a.x(0, 1) == 0.0);
    CHECK(a.x(0, 2) == -2.0);

    std::istringstream binary("+1 2:1\n-1 1:1\n# comment\n\n+1 1:0.25 2:4\n");
    const Dataset b = parse_libsvm(binary);
    CHECK(b.task == Task::binary);
    CHECK(b.dim() == 2);
    CHECK(b.y == Eigen::Vector3d(1, -1, 1));

    std::istringstream multi("3 1:1\n7 1:2\n5 1:3\n3 1:4\n");
    const Dataset c = parse_libsvm(multi);
    CHECK(c.task == Task::multiclass);
    CHECK(c.y == Eigen::Vector4d(0, 2, 1, 0));

    // Disjoint index ranges with an explicit width line up.
    std::istringstream left("1 1:1 2:1\n-1 2:3\n"), right("1 5:1\n-1 4:2\n");
    CHECK(parse_libsvm(left, {6, std::nullopt}).dim() == parse_libsvm(right, {6, std::nullopt}).dim());
}

TEST_CASE("libsvm errors carry line numbers") {
    auto line_of = [](const std::string& text, LibsvmOptions opts = {}) -> std::size_t {
        std::istringstream in(text);
        try {
            parse_libsvm(in, opts);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("1 1:1\n1 2:x\n") == 2);
    CHECK(line_of("1 1:1\n1 1:2\nabc 1:1\n") == 3);
    CHECK(line_of("1 0:1\n") == 1);
    CHECK(line_of("1 3:1 2:1\n") == 1);
    CHECK(line_of("1 3:1\n", {2, std::nullopt}) == 1);
    CHECK(line_of("1 3\n") == 1);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_libsvm(empty), ParseError);
    CHECK_THROWS(load_libsvm("/nonexistent/file.libsvm"));
}

TEST_CASE("libsvm round trip is bit exact") {
    for (const Dataset& data : {gen_grid2d(Grid2dKind::sine, 300, 1), gen_daniely(2, 300, 2)}) {
        std::stringstream buf;
        write_libsvm(data, buf);
        const Dataset back = parse_libsvm(buf, {data.dim(), data.task});
        CHECK(back.x == data.x);
        CHECK(back.y == data.y);
        CHECK(back.task == data.task);
    }
}

TEST_CASE("normalization") {
    const Dataset raw = gen_daniely(2, 200, 3);
    const Dataset unit = normalize(raw, NormalizeMode::unit_ball);
    CHECK(std::abs(unit.radius - 1.0) <= 1e-12);
    const Dataset again = normalize(unit, NormalizeMode::unit_ball);
    CHECK((again.x - unit.x).cwiseAbs().maxCoeff() <= 1e-12);

    Matrix x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    const Dataset std_data = normalize(Dataset::make(x, Vector::Zero(4), Task::regression), NormalizeMode::per_feature_standard);
    CHECK(std::abs(std_data.x.col(0).mean()) <= 1e-15);
    CHECK(std_data.x.col(0).squaredNorm() / 4 == doctest::Approx(1.0));
    CHECK(std_data.x.col(1).isZero(0.0));
}

TEST_CASE("kfold partitions") {
    const Dataset ten = Dataset::make(Matrix::Zero(10, 1), Vector::Zero(10), Task::regression);
    const auto folds = kfold(ten, {5, 1, true});
    REQUIRE(folds.size() == 5);
    std::multiset<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK(f.validation.size() == 2);
        CHECK(f.train.size() == 8);
        seen.insert(f.validation.begin(), f.validation.end());
        for (std::size_t i : f.validation) CHECK(std::find(f.train.begin(), f.train.end(), i) == f.train.end());
    }
    CHECK(seen.size() == 10);
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 10);
    CHECK_THROWS_AS(kfold(ten, {11, 1, true}), std::invalid_argument);
    CHECK_THROWS_AS(kfold(ten, {1, 1, true}), std::invalid_argument);

    const auto again = kfold(ten, {5, 1, true});
    for (std::size_t i = 0; i < 5; ++i) CHECK(again[i].validation == folds[i].validation);
}

TEST_CASE("stratified folds keep the class ratio") {
    Vector y(1000);
    for (int i = 0; i < 1000; ++i) y[i] = i % 10 == 0 ? 1.0 : -1.0;
    const Dataset data = Dataset::make(Matrix::Zero(1000, 1), y, Task::binary);
    for (const auto& f : kfold(data, {5, 3, true})) {
        int minority = 0;
        for (std::size_t i : f.validation) minority += y[static_cast<Eigen::Index>(i)] > 0;
        CHECK(minority >= 18);
        CHECK(minority <= 22);
    }
}

TEST_CASE("holdout split") {
    const Dataset data = gen_daniely(2, 1000, 1);
    const Fold s = holdout_split(data, 0.2, 5);
    CHECK(s.validation.size() == 200);
    CHECK(s.train.size() == 800);
    CHECK(holdout_split(data, 0.2, 5).validation == s.validation);
    CHECK_THROWS_AS(holdout_split(data, 0.0, 1), std::invalid_argument);
}

TEST_CASE("csv and manifest") {
    Matrix x(2, 2);
    x << 0.5, -1, 2, 0.25;
    const Dataset data = Dataset::make(x, Eigen::Vector2d(1, -1), Task::binary, "toy");
    std::ostringstream csv;
    write_csv(data, csv);
    CHECK(csv.str() == "x1,x2,y\n0.5,-1,1\n2,0.25,-1\n");
    const auto j = nlohmann::json::parse(manifest_json(data, 42));
    CHECK(j["name"] == "toy");
    CHECK(j["m"] == 2);
    CHECK(j["d"] == 2);
    CHECK(j["task"] == "binary");
    CHECK(j["seed"] == 42);
    CHECK(j["radius"].get<double>() == doctest::Approx(std::sqrt(4.0625)));
}
