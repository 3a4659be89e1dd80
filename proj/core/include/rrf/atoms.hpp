#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rrf/linalg.hpp"

namespace rrf {

struct Atom {
    double coeff = 0.0;
    Vector omega;  // (d+1)-vector, last slot multiplies the constant 1
};

/// f(x) = sum_j a_j relu(w_j . (x, 1)): a finite signed combination of ReLU atoms.
class AtomicFunction {
public:
    explicit AtomicFunction(int input_dim, std::vector<Atom> atoms = {});

    int input_dim() const { return input_dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double operator()(const Vector& x) const;
    Vector operator()(const Matrix& xs) const;  // one value per row

private:
    int input_dim_;
    std::vector<Atom> atoms_;
};

double evaluate(const AtomicFunction& f, const Vector& x);

/// sum_j |a_j| |w_j| (total variation, not cancellation).
double total_mass(const AtomicFunction& f);

/// N atoms drawn i.i.d. with probability |a_j||w_j| / mass; each carries the
/// unit direction w_j/|w_j| and coefficient sign(a_j) mass / N. Zero-mass input
/// yields an empty function (identically zero).
AtomicFunction maurey_sparsify(const AtomicFunction& f, int n, std::uint64_t seed);

/// mass * sqrt(r^2 + 1) / sqrt(N).
double maurey_error_bound(double mass, double radius, int n);

/// Root mean squared difference of f and g over the sample rows.
double l2_distance(const AtomicFunction& f, const AtomicFunction& g, const Matrix& samples);

struct BestSparsification {
    AtomicFunction approx;
    double error = 0.0;
    int trial = 0;
};

/// Smallest-error sparsification among `trials` independent draws; trial t uses
/// substream t of `seed`, so the result does not depend on `jobs`.
BestSparsification best_of_k_sparsify(const AtomicFunction& f, int n, const Matrix& samples, int trials,
                                      std::uint64_t seed, unsigned jobs = 1);

class VectorAtomic {
public:
    VectorAtomic(int input_dim, std::vector<AtomicFunction> components);

    int input_dim() const { return input_dim_; }
    int output_dim() const { return static_cast<int>(components_.size()); }
    const std::vector<AtomicFunction>& components() const { return components_; }

    // sqrt(sum_i mass_i^2)
    double norm() const;
    Matrix operator()(const Matrix& xs) const;

private:
    int input_dim_;
    std::vector<AtomicFunction> components_;
};

/// Composition f_L o ... o f_1 with the domain radius r, margin s and the
/// per-layer norm bounds R_i the construction is sized against.
struct LayerStack {
    std::vector<VectorAtomic> layers;
    double radius = 1.0;
    double margin = 1.0;
    std::vector<double> norms;

    void validate() const;
    int depth() const { return static_cast<int>(layers.size()); }
    Matrix operator()(const Matrix& xs) const;
};

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;
};

/// Explicit ReLU network: every layer but the last is ReLU(W h + b); the last is linear.
struct AssembledNet {
    std::vector<DenseLayer> layers;
    std::vector<long> atoms_per_component;  // N_i
    std::vector<long> hidden_widths;        // m_{i+1} N_i
    double rescale = 1.0;                   // factor applied to the first layer

    Matrix forward(const Matrix& xs) const;
};

struct StackApproxOptions {
    long node_budget = 1L << 20;  // max N_i
    int trials = 20;              // best-of-K per component
    unsigned jobs = 1;
};

struct StackApproximation {
    AssembledNet net;
    std::vector<VectorAtomic> layers;  // sparsified g_1 .. g_L
};

/// N_i for every layer: N_L = ceil(R_L^2 ((r+s)^2+1) / eps^2), N_i = ceil(R_i^2 N_{i+1}).
/// Each N_i is at least prod_{j>=i} R_j^2 ((r+s)^2+1) / eps^2.
std::vector<long> stack_atom_counts(const LayerStack& stack, double epsilon);

/// Sparsifies each layer (best-of-K against the push-forward of `samples`
/// through the already-built layers) and assembles the weight matrices.
/// With trials <= 1 or no samples, a single draw per component is used.
StackApproximation approximate_stack(const LayerStack& stack, double epsilon, const Matrix& samples,
                                     std::uint64_t seed, const StackApproxOptions& options = {});

/// C = L + (r + sqrt(r^2+1) prod R_i) / s * sqrt(sum_{i<L} i^2 / prod_{j>i} R_j^2).
double stack_error_constant(const LayerStack& stack);

/// Composition of vector-valued layers applied to each sample row.
Matrix compose(const std::vector<VectorAtomic>& layers, const Matrix& xs);

/// Frobenius and bias bounds of the assembled network; returns one message per
/// violated bound (empty when all hold).
std::vector<std::string> assembled_violations(const AssembledNet& net, const LayerStack& stack);

}  // namespace rrf
