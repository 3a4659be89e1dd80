#include "rrf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "rrf/errors.hpp"
#include "rrf/random.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

constexpr double kBoundaryMargin = 1e-12;

void fill_unit(Eigen::Ref<RowVector> row, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm = 0.0;
    do {
        for (Eigen::Index k = 0; k < row.size(); ++k) row[k] = normal(rng);
        norm = row.norm();
    } while (norm == 0.0);
    row /= norm;
}

}  // namespace

const char* to_string(Task task) {
    switch (task) {
        case Task::binary: return "binary";
        case Task::multiclass: return "multiclass";
        case Task::regression: return "regression";
    }
    return "?";
}

Task task_from_string(const std::string& name) {
    if (name == "binary") return Task::binary;
    if (name == "multiclass") return Task::multiclass;
    if (name == "regression") return Task::regression;
    throw std::invalid_argument("unknown task '" + name + "'");
}

double max_row_norm(const Matrix& x) {
    if (x.rows() == 0) return 0.0;
    return x.rowwise().norm().maxCoeff();
}

Dataset Dataset::make(Matrix x, Vector y, Task task, std::string name) {
    Dataset d;
    d.radius = max_row_norm(x);
    d.x = std::move(x);
    d.y = std::move(y);
    d.task = task;
    d.name = std::move(name);
    d.validate();
    return d;
}

int Dataset::num_classes() const {
    switch (task) {
        case Task::binary: return 2;
        case Task::multiclass: return y.size() ? static_cast<int>(y.maxCoeff()) + 1 : 0;
        case Task::regression: return 0;
    }
    return 0;
}

void Dataset::validate() const {
    if (x.rows() < 1) throw std::invalid_argument("dataset needs at least one sample");
    if (y.size() != x.rows()) throw ShapeError("label count does not match sample count");
    if (!x.allFinite() || !std::isfinite(radius)) throw std::invalid_argument("dataset has non-finite entries");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double v = y[i];
        bool ok = std::isfinite(v);
        if (task == Task::binary) ok = v == 1.0 || v == -1.0;
        if (task == Task::multiclass) ok = v >= 0.0 && v == std::floor(v);
        if (!ok) {
            throw LabelError("label " + text::format_double(v) + " at row " + std::to_string(i) +
                             " is invalid for a " + to_string(task) + " task");
        }
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Matrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
    Vector ys(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        if (r >= x.rows()) throw std::out_of_range("subset row out of range");
        xs.row(static_cast<Eigen::Index>(i)) = x.row(r);
        ys[static_cast<Eigen::Index>(i)] = y[r];
    }
    Dataset out;
    out.radius = max_row_norm(xs);
    out.x = std::move(xs);
    out.y = std::move(ys);
    out.task = task;
    out.name = name;
    return out;
}

Dataset gen_daniely(int d, int m, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("daniely generator needs d >= 2");
    if (m < 1) throw std::invalid_argument("sample count must be >= 1");
    Rng rng = make_rng(seed);
    Matrix x(m, 2 * d);
    Vector y(m);
    RowVector u(d), v(d);
    for (int i = 0; i < m; ++i) {
        fill_unit(u, rng);
        fill_unit(v, rng);
        x.row(i) << u, v;
        y[i] = std::sin(8.0 * std::numbers::pi * u.dot(v));
    }
    return Dataset::make(std::move(x), std::move(y), Task::regression, "daniely");
}

const char* to_string(Grid2dKind kind) {
    switch (kind) {
        case Grid2dKind::sine: return "sine";
        case Grid2dKind::strips: return "strips";
        case Grid2dKind::square: return "square";
        case Grid2dKind::checkboard: return "checkboard";
    }
    return "?";
}

Grid2dKind grid2d_kind_from_string(const std::string& name) {
    if (name == "sine") return Grid2dKind::sine;
    if (name == "strips") return Grid2dKind::strips;
    if (name == "square") return Grid2dKind::square;
    if (name == "checkboard") return Grid2dKind::checkboard;
    throw std::invalid_argument("unknown grid2d kind '" + name + "'");
}

double grid2d_margin(Grid2dKind kind, double x1, double x2) {
    const double pi = std::numbers::pi;
    switch (kind) {
        case Grid2dKind::sine: return x2 - 0.5 * std::sin(2.0 * pi * x1);
        case Grid2dKind::strips: return std::sin(3.0 * pi * x1);
        case Grid2dKind::square: return 0.5 - std::max(std::abs(x1), std::abs(x2));
        case Grid2dKind::checkboard: return std::sin(3.0 * pi * x1) * std::sin(3.0 * pi * x2);
    }
    throw std::invalid_argument("unknown grid2d kind");
}

Dataset gen_grid2d(Grid2dKind kind, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("sample count must be >= 1");
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Matrix x(m, 2);
    Vector y(m);
    for (int i = 0; i < m; ++i) {
        double a = 0.0, b = 0.0, g = 0.0;
        do {
            a = uniform(rng);
            b = uniform(rng);
            g = grid2d_margin(kind, a, b);
        } while (std::abs(g) < kBoundaryMargin);
        x(i, 0) = a;
        x(i, 1) = b;
        y[i] = g > 0.0 ? 1.0 : -1.0;
    }
    return Dataset::make(std::move(x), std::move(y), Task::binary, to_string(kind));
}

Dataset gen_radial(int d, int m, const RadialDensity& density, const std::function<double(double)>& label,
                   Task task, std::uint64_t seed) {
    if (d < 1 || m < 1) throw std::invalid_argument("dimension and sample count must be >= 1");
    if (density.edges.size() != density.weights.size() + 1 || density.weights.empty()) {
        throw std::invalid_argument("radial density needs one more edge than weights");
    }
    for (std::size_t i = 0; i + 1 < density.edges.size(); ++i) {
        if (!(density.edges[i] >= 0.0) || !(density.edges[i + 1] > density.edges[i])) {
            throw std::invalid_argument("radial edges must be non-negative and increasing");
        }
    }
    for (double w : density.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("radial weights must be >= 0");
    }
    Rng rng = make_rng(seed);
    std::piecewise_constant_distribution<double> radius(density.edges.begin(), density.edges.end(),
                                                        density.weights.begin());
    Matrix x(m, d);
    Vector y(m);
    RowVector dir(d);
    for (int i = 0; i < m; ++i) {
        fill_unit(dir, rng);
        const double r = radius(rng);
        x.row(i) = r * dir;
        y[i] = label(r);
    }
    return Dataset::make(std::move(x), std::move(y), task, "radial");
}

Dataset normalize(const Dataset& data, NormalizeMode mode) {
    Dataset out = data;
    if (mode == NormalizeMode::unit_ball) {
        if (data.radius > 0.0) out.x /= data.radius;
    } else {
        const double m = static_cast<double>(data.x.rows());
        const RowVector mean = data.x.colwise().mean();
        out.x.rowwise() -= mean;
        const RowVector var = out.x.colwise().squaredNorm() / m;
        for (Eigen::Index j = 0; j < out.x.cols(); ++j) {
            if (var[j] > 0.0) {
                out.x.col(j) /= std::sqrt(var[j]);
            } else {
                out.x.col(j).setZero();
            }
        }
    }
    out.radius = max_row_norm(out.x);
    return out;
}

void write_csv(const Dataset& data, std::ostream& out) {
    for (int j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    for (int i = 0; i < data.size(); ++i) {
        for (int j = 0; j < data.dim(); ++j) out << text::format_double(data.x(i, j)) << ',';
        out << text::format_double(data.y[i]) << '\n';
    }
}

std::string manifest_json(const Dataset& data, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["name"] = data.name;
    j["m"] = data.size();
    j["d"] = data.dim();
    j["task"] = to_string(data.task);
    j["radius"] = data.radius;
    j["seed"] = seed;
    return j.dump(2);
}

}  // namespace rrf
