#include "rrf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rrf/errors.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

constexpr double kClampSlack = 1e-9;
constexpr double kPsdTolerance = 1e-8;
constexpr double kJitter = 1e-10;

void require_dim(int d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
}

}  // namespace

double arccos_kernel(double s, int d) {
    require_dim(d);
    if (!(std::abs(s) <= 1.0 + kClampSlack)) {
        throw std::domain_error("arccos kernel argument " + text::format_double(s) + " outside [-1, 1]");
    }
    s = std::clamp(s, -1.0, 1.0);
    const double pi = std::numbers::pi;
    return (std::sqrt(1.0 - s * s) + (pi - std::acos(s)) * s) / (2.0 * (d + 1) * pi);
}

ArcCosKernel::ArcCosKernel(int ambient_dim) : d_(ambient_dim) { require_dim(ambient_dim); }

double ArcCosKernel::operator()(double s) const { return arccos_kernel(s, d_); }

Matrix ArcCosKernel::gram(const Matrix& points) const {
    if (points.cols() != d_ + 1) throw ShapeError("points must live in R^{d+1}");
    const Matrix inner = points * points.transpose();
    const Eigen::Index m = points.rows();
    Matrix k(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            k(i, j) = arccos_kernel(inner(i, j), d_);
            k(j, i) = k(i, j);
        }
    }
    return k;
}

double TaylorCoeffs::evaluate(double s) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
    return acc;
}

TaylorCoeffs taylor_coeffs(int d, int max_order) {
    require_dim(d);
    if (max_order < 0) throw std::invalid_argument("max order must be >= 0");
    const double pi = std::numbers::pi;
    const double base = 1.0 / (2.0 * (d + 1) * pi);

    TaylorCoeffs out{d, std::vector<double>(static_cast<std::size_t>(max_order) + 1, 0.0)};
    auto& a = out.coeffs;
    a[0] = base;
    if (max_order >= 1) a[1] = 1.0 / (4.0 * (d + 1));
    if (max_order >= 2) a[2] = base / 2.0;
    // ratio_k = (2k-3)!! / (2k)!!, advanced by (2k-3)/(2k); ratio_1 = 1/2.
    double ratio = 0.5;
    for (int k = 2; 2 * k <= max_order; ++k) {
        ratio *= static_cast<double>(2 * k - 3) / static_cast<double>(2 * k);
        a[static_cast<std::size_t>(2 * k)] = base * ratio / static_cast<double>(2 * k - 1);
    }
    return out;
}

Vector homogeneous_lift(const Vector& x) {
    Vector out(x.size() + 1);
    out.head(x.size()) = x;
    out[x.size()] = 1.0;
    return out / std::sqrt(x.squaredNorm() + 1.0);
}

double mc_kernel_estimate_sphere(const Vector& x, const Vector& x2, const Matrix& omegas) {
    if (x.size() != omegas.cols() || x2.size() != omegas.cols()) {
        throw ShapeError("points must match the weight dimension");
    }
    const Vector a = (omegas * x).cwiseMax(0.0);
    const Vector b = (omegas * x2).cwiseMax(0.0);
    return a.dot(b) / static_cast<double>(omegas.rows());
}

double mc_kernel_estimate(const Vector& x, const Vector& x2, const FeatureBank& bank) {
    if (bank.spec().kind != FeatureKind::relu) throw std::invalid_argument("kernel estimate needs a relu bank");
    if (x.size() != bank.input_dim() || x2.size() != bank.input_dim()) {
        throw ShapeError("points must have " + std::to_string(bank.input_dim()) + " coordinates");
    }
    const double tail = 1.0 / bank.spec().bandwidth;
    Vector xa(x.size() + 1), xb(x2.size() + 1);
    xa << x, tail;
    xb << x2, tail;
    return mc_kernel_estimate_sphere(xa, xb, bank.omegas());
}

AdmissibilityReport empirical_dmax(const Matrix& kernel_matrix, const Matrix& probe_features, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    const Eigen::Index m = kernel_matrix.rows();
    if (m < 1 || kernel_matrix.cols() != m) throw ShapeError("kernel matrix must be square and nonempty");
    if (probe_features.cols() != m) throw ShapeError("probe rows must have one entry per sample");

    const double scale = std::max(1.0, kernel_matrix.cwiseAbs().maxCoeff());
    if ((kernel_matrix - kernel_matrix.transpose()).cwiseAbs().maxCoeff() > kPsdTolerance * scale) {
        throw NumericalError("kernel matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(kernel_matrix, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTolerance * scale) {
        throw NumericalError("kernel matrix is not positive semidefinite (min eigenvalue " +
                             text::format_double(eig.eigenvalues().minCoeff()) + ")");
    }

    const double md = static_cast<double>(m);
    Matrix system = kernel_matrix / md;
    system.diagonal().array() += lambda;

    AdmissibilityReport report{lambda, 0.0, static_cast<int>(m), static_cast<int>(probe_features.rows()), 0.0};
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
        report.jitter = kJitter;
        system.diagonal().array() += kJitter;
        llt.compute(system);
        if (llt.info() != Eigen::Success) throw NumericalError("regularized system could not be factorized");
    }
    // v^T S^{-1} v = |L^{-1} v|^2 for S = L L^T.
    const Matrix solved = llt.matrixL().solve(probe_features.transpose());
    report.dmax = solved.colwise().squaredNorm().maxCoeff() / md;
    return report;
}

double norm_bound_projection(double alpha, int p, int d) {
    require_dim(d);
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (p < 1 || (p > 1 && p % 2 != 0)) {
        throw UnsupportedOrder("projection bound holds for p = 1 or even p, got " + std::to_string(p));
    }
    return std::sqrt(2.0 * (d + 1) * std::numbers::pi) * alpha * p;
}

double norm_bound_radius(int d) {
    require_dim(d);
    return 2.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(d + 1.0, 1.5);
}

double norm_bound_dotprod(int d) {
    require_dim(d);
    return 12.0 * d * std::sqrt((4.0 * d + 2.0) * std::numbers::pi);
}

void write_taylor_csv(const TaylorCoeffs& coeffs, std::ostream& out) {
    out << "j,a_j\n";
    for (std::size_t j = 0; j < coeffs.coeffs.size(); ++j) {
        out << j << ',' << text::format_double(coeffs.coeffs[j]) << '\n';
    }
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << text::format_double(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace rrf
