#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rrf/linalg.hpp"

namespace rrf {

enum class FeatureKind { relu, fourier };

struct UniformSphere {};

struct Gaussian {
    double scale = 1.0;
};

// Uniform sphere directions stretched coordinate-wise by `axes`.
struct Ellipsoid {
    std::vector<double> axes;
};

using FeatureDistribution = std::variant<UniformSphere, Gaussian, Ellipsoid>;

struct FeatureSpec {
    FeatureKind kind = FeatureKind::relu;
    int input_dim = 1;
    int count = 1;
    double bandwidth = 1.0;
    FeatureDistribution distribution = UniformSphere{};
    std::uint64_t seed = 0;

    // Throws std::invalid_argument when any field is out of range.
    void validate() const;

    // Width of an inner weight: d+1 for ReLU features (bias slot last), d for Fourier.
    int weight_dim() const { return kind == FeatureKind::relu ? input_dim + 1 : input_dim; }
};

/// Sampled inner weights of a finite random-feature map. Immutable once built
/// and safe to share between threads.
class FeatureBank {
public:
    /// Draws the bank described by `spec`; the result is a pure function of the spec.
    static FeatureBank sample(const FeatureSpec& spec);

    /// Wraps explicit weights. `omegas` must be count x weight_dim; `phases`
    /// must have `count` entries for Fourier banks and be empty for ReLU banks.
    FeatureBank(FeatureSpec spec, Matrix omegas, Vector phases = {});

    const FeatureSpec& spec() const { return spec_; }
    const Matrix& omegas() const { return omegas_; }
    const Vector& phases() const { return phases_; }
    int input_dim() const { return spec_.input_dim; }
    int count() const { return spec_.count; }

private:
    FeatureSpec spec_;
    Matrix omegas_;
    Vector phases_;
};

struct FeatureMatrix {
    Matrix values;  // samples x features
    FeatureSpec spec;

    // Fraction of entries that are exactly zero.
    double zero_fraction() const;
};

/// N rows drawn uniformly from the unit sphere S^d in R^{d+1}.
Matrix sample_sphere(int d, int n, std::uint64_t seed);

/// N rows in R^{d+1} with i.i.d. Normal(0, scale^2) entries.
Matrix sample_gaussian(int d, int n, double scale, std::uint64_t seed);

/// N rows of sphere directions in R^{axes.size()} scaled coordinate-wise by `axes`.
Matrix sample_ellipsoid(const std::vector<double>& axes, int n, std::uint64_t seed);

/// values(i, j) = max(0, w_j . (x_i, 1/gamma)).
FeatureMatrix relu_features(const Matrix& x, const FeatureBank& bank);

/// values(i, j) = sqrt(2) cos(w_j . x_i / gamma + b_j).
FeatureMatrix fourier_features(const Matrix& x, const FeatureBank& bank);

// Dispatches on bank.spec().kind.
FeatureMatrix compute_features(const Matrix& x, const FeatureBank& bank);

// Text dump: one header line of key=value pairs, the weight rows, then the
// phase row for Fourier banks. Doubles are written in shortest round-trip form.
void write_bank(const FeatureBank& bank, std::ostream& out);
FeatureBank read_bank(std::istream& in);

const char* to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& name);

}  // namespace rrf
