#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrf/linalg.hpp"

namespace rrf {

enum class Task { binary, multiclass, regression };

const char* to_string(Task task);
Task task_from_string(const std::string& name);

/// Samples with labels. Binary labels are -1/+1, multiclass labels are class
/// indices 0..K-1 stored as doubles, regression labels are arbitrary reals.
struct Dataset {
    Matrix x;
    Vector y;
    Task task = Task::regression;
    double radius = 0.0;  // max row norm of x
    std::string name;

    // Builds the dataset and fills in the radius; validates labels against the task.
    static Dataset make(Matrix x, Vector y, Task task, std::string name = {});

    int size() const { return static_cast<int>(x.rows()); }
    int dim() const { return static_cast<int>(x.cols()); }
    int num_classes() const;  // 2 for binary, K for multiclass, 0 for regression

    void validate() const;
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

double max_row_norm(const Matrix& x);

/// x = (u, v) with u, v uniform on S^{d-1}; y = sin(8 pi u.v).
Dataset gen_daniely(int d, int m, std::uint64_t seed);

enum class Grid2dKind { sine, strips, square, checkboard };

const char* to_string(Grid2dKind kind);
Grid2dKind grid2d_kind_from_string(const std::string& name);

/// Signed decision function of a 2-d benchmark; the label is its sign.
///   sine:       x2 - 0.5 sin(2 pi x1)
///   strips:     sin(3 pi x1)
///   square:     0.5 - max(|x1|, |x2|)
///   checkboard: sin(3 pi x1) sin(3 pi x2)
double grid2d_margin(Grid2dKind kind, double x1, double x2);

/// x uniform on [-1, 1]^2, labels +-1 from grid2d_margin. Points with
/// |margin| < 1e-12 are redrawn.
Dataset gen_grid2d(Grid2dKind kind, int m, std::uint64_t seed);

/// Piecewise-constant radial density: weight[i] on [edges[i], edges[i+1]).
struct RadialDensity {
    std::vector<double> edges;
    std::vector<double> weights;
};

/// Direction uniform on S^{d-1}, radius drawn from `density`, label = label(radius).
Dataset gen_radial(int d, int m, const RadialDensity& density, const std::function<double(double)>& label,
                   Task task, std::uint64_t seed);

enum class NormalizeMode { unit_ball, per_feature_standard };

/// unit_ball: x / radius. per_feature_standard: zero mean, unit variance per
/// column; constant columns become 0.
Dataset normalize(const Dataset& data, NormalizeMode mode);

/// CSV with header x1..xd,y.
void write_csv(const Dataset& data, std::ostream& out);

/// JSON manifest {name, m, d, task, radius, seed}.
std::string manifest_json(const Dataset& data, std::uint64_t seed);

}  // namespace rrf
