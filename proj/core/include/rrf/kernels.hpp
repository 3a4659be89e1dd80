#pragma once

#include <iosfwd>
#include <vector>

#include "rrf/features.hpp"
#include "rrf/linalg.hpp"

namespace rrf {

/// First-order arc-cosine kernel on S^d, the kernel induced by ReLU features
/// with uniform-sphere inner weights.
class ArcCosKernel {
public:
    explicit ArcCosKernel(int ambient_dim);

    int ambient_dim() const { return d_; }

    /// k(s) for an inner product s of two unit vectors.
    double operator()(double s) const;

    /// Gram matrix of unit-norm rows (each row a point on S^d).
    Matrix gram(const Matrix& points) const;

private:
    int d_;
};

/// k(s) = (sqrt(1 - s^2) + (pi - arccos s) s) / (2 (d+1) pi). Inputs within
/// 1e-9 of [-1, 1] are clamped; anything further out throws std::domain_error.
double arccos_kernel(double s, int d);

struct TaylorCoeffs {
    int d = 1;
    std::vector<double> coeffs;  // a_0 .. a_J

    // Partial sum sum_j a_j s^j (Horner).
    double evaluate(double s) const;
};

/// Power-series coefficients of arccos_kernel(., d) through order J.
TaylorCoeffs taylor_coeffs(int d, int max_order);

/// Maps x in R^d onto S^d via (x, 1) / sqrt(|x|^2 + 1).
Vector homogeneous_lift(const Vector& x);

/// Monte-Carlo estimate (1/N) sum_j relu(w_j.(x,1/gamma)) relu(w_j.(x2,1/gamma)).
double mc_kernel_estimate(const Vector& x, const Vector& x2, const FeatureBank& bank);

/// Same estimate for points already on S^d: (1/N) sum_j relu(w_j.x) relu(w_j.x2),
/// with `omegas` an N x (d+1) weight matrix.
double mc_kernel_estimate_sphere(const Vector& x, const Vector& x2, const Matrix& omegas);

struct AdmissibilityReport {
    double lambda = 0.0;
    double dmax = 0.0;
    int sample_count = 0;
    int probe_count = 0;
    double jitter = 0.0;  // diagonal jitter added after a failed factorization, else 0
};

/// Empirical plug-in for sup_w <phi_w, (Sigma + lambda I)^{-1} phi_w>:
/// max over probe rows v of (1/m) v^T (K/m + lambda I)^{-1} v.
/// `probe_features` holds one probe per row, evaluated at the m data points.
AdmissibilityReport empirical_dmax(const Matrix& kernel_matrix, const Matrix& probe_features, double lambda);

/// RKHS-norm bound sqrt(2(d+1)pi) alpha p for alpha (beta . x)^p on S^d (p = 1 or even).
double norm_bound_projection(double alpha, int p, int d);

/// RKHS-norm bound 2 sqrt(2 pi) (d+1)^{3/2} for sqrt(1 + |x|^2).
double norm_bound_radius(int d);

/// RKHS-norm bound 12 d sqrt((4d+2) pi) for x_{1:d} . x_{d+1:2d}.
double norm_bound_dotprod(int d);

void write_taylor_csv(const TaylorCoeffs& coeffs, std::ostream& out);
void write_matrix_csv(const Matrix& m, std::ostream& out);

}  // namespace rrf
