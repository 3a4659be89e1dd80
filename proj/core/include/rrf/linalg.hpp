#pragma once

#include <Eigen/Dense>

namespace rrf {

// Row-major so that row i is sample i (or feature j) in contiguous memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace rrf
