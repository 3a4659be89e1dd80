#include "rrf/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rrf/errors.hpp"
#include "rrf/parallel.hpp"
#include "rrf/random.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

// Relative slack on the closed-form bounds, covering summation round-off only.
constexpr double kBoundSlack = 1e-12;

Vector append_one(const Vector& x) {
    Vector out(x.size() + 1);
    out << x, 1.0;
    return out;
}

}  // namespace

AtomicFunction::AtomicFunction(int input_dim, std::vector<Atom> atoms)
    : input_dim_(input_dim), atoms_(std::move(atoms)) {
    if (input_dim_ < 1) throw std::invalid_argument("input_dim must be >= 1");
    for (const auto& atom : atoms_) {
        if (atom.omega.size() != input_dim_ + 1) {
            throw ShapeError("atom weight must have " + std::to_string(input_dim_ + 1) + " entries");
        }
        if (atom.omega.squaredNorm() == 0.0) throw std::invalid_argument("atom weight must be nonzero");
        if (!std::isfinite(atom.coeff) || !atom.omega.allFinite()) {
            throw std::invalid_argument("atom entries must be finite");
        }
    }
}

double AtomicFunction::operator()(const Vector& x) const {
    if (x.size() != input_dim_) {
        throw ShapeError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(input_dim_));
    }
    const Vector xa = append_one(x);
    double acc = 0.0;
    for (const auto& atom : atoms_) acc += atom.coeff * relu(atom.omega.dot(xa));
    return acc;
}

Vector AtomicFunction::operator()(const Matrix& xs) const {
    if (xs.cols() != input_dim_) throw ShapeError("sample rows do not match input_dim");
    Vector out = Vector::Zero(xs.rows());
    if (atoms_.empty()) return out;
    Matrix weights(static_cast<Eigen::Index>(atoms_.size()), input_dim_ + 1);
    Vector coeffs(static_cast<Eigen::Index>(atoms_.size()));
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        weights.row(static_cast<Eigen::Index>(j)) = atoms_[j].omega.transpose();
        coeffs[static_cast<Eigen::Index>(j)] = atoms_[j].coeff;
    }
    Matrix pre = xs * weights.leftCols(input_dim_).transpose();
    pre.rowwise() += weights.col(input_dim_).transpose();
    return pre.cwiseMax(0.0) * coeffs;
}

double evaluate(const AtomicFunction& f, const Vector& x) { return f(x); }

double total_mass(const AtomicFunction& f) {
    double mass = 0.0;
    for (const auto& atom : f.atoms()) mass += std::abs(atom.coeff) * atom.omega.norm();
    return mass;
}

AtomicFunction maurey_sparsify(const AtomicFunction& f, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("atom count must be >= 1");
    std::vector<double> weights;
    std::vector<const Atom*> sources;
    for (const auto& atom : f.atoms()) {
        if (atom.coeff == 0.0) continue;
        weights.push_back(std::abs(atom.coeff) * atom.omega.norm());
        sources.push_back(&atom);
    }
    double mass = 0.0;
    for (double w : weights) mass += w;
    if (mass == 0.0) return AtomicFunction(f.input_dim());

    Rng rng = make_rng(seed);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const double magnitude = mass / n;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Atom& src = *sources[pick(rng)];
        atoms.push_back({std::copysign(magnitude, src.coeff), src.omega / src.omega.norm()});
    }
    return AtomicFunction(f.input_dim(), std::move(atoms));
}

double maurey_error_bound(double mass, double radius, int n) {
    if (n < 1) throw std::invalid_argument("atom count must be >= 1");
    return mass * std::sqrt(radius * radius + 1.0) / std::sqrt(static_cast<double>(n));
}

double l2_distance(const AtomicFunction& f, const AtomicFunction& g, const Matrix& samples) {
    if (samples.rows() == 0) throw std::invalid_argument("need at least one sample");
    const Vector diff = f(samples) - g(samples);
    return std::sqrt(diff.squaredNorm() / static_cast<double>(samples.rows()));
}

BestSparsification best_of_k_sparsify(const AtomicFunction& f, int n, const Matrix& samples, int trials,
                                      std::uint64_t seed, unsigned jobs) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const Vector target = f(samples);
    std::vector<AtomicFunction> draws(static_cast<std::size_t>(trials), AtomicFunction(f.input_dim()));
    std::vector<double> errors(static_cast<std::size_t>(trials), 0.0);
    parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
        draws[t] = maurey_sparsify(f, n, substream_seed(seed, t));
        if (samples.rows() > 0) {
            errors[t] = std::sqrt((target - draws[t](samples)).squaredNorm() / static_cast<double>(samples.rows()));
        }
    });
    const auto best = static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) - errors.begin());
    return {std::move(draws[best]), errors[best], static_cast<int>(best)};
}

VectorAtomic::VectorAtomic(int input_dim, std::vector<AtomicFunction> components)
    : input_dim_(input_dim), components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("vector function needs at least one component");
    for (const auto& c : components_) {
        if (c.input_dim() != input_dim_) throw ShapeError("component input_dim mismatch");
    }
}

double VectorAtomic::norm() const {
    double sq = 0.0;
    for (const auto& c : components_) {
        const double m = total_mass(c);
        sq += m * m;
    }
    return std::sqrt(sq);
}

Matrix VectorAtomic::operator()(const Matrix& xs) const {
    Matrix out(xs.rows(), output_dim());
    for (int i = 0; i < output_dim(); ++i) out.col(i) = components_[static_cast<std::size_t>(i)](xs);
    return out;
}

void LayerStack::validate() const {
    if (layers.empty()) throw std::invalid_argument("stack needs at least one layer");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    // The margin only enters through the out-of-good-set term, which is empty for one layer.
    if (layers.size() > 1 ? !(margin > 0.0) : !(margin >= 0.0)) {
        throw std::invalid_argument("margin must be > 0");
    }
    if (norms.size() != layers.size()) throw std::invalid_argument("need one norm bound per layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (i > 0 && layers[i].input_dim() != layers[i - 1].output_dim()) {
            throw ShapeError("layer " + std::to_string(i + 1) + " input_dim does not match previous output_dim");
        }
        if (!(norms[i] > 0.0)) throw std::invalid_argument("norm bounds must be > 0");
        if (layers[i].norm() > norms[i] * (1.0 + kBoundSlack)) {
            throw std::invalid_argument("layer " + std::to_string(i + 1) + " has norm " +
                                        text::format_double(layers[i].norm()) + " above its bound " +
                                        text::format_double(norms[i]));
        }
    }
}

Matrix LayerStack::operator()(const Matrix& xs) const { return compose(layers, xs); }

Matrix compose(const std::vector<VectorAtomic>& layers, const Matrix& xs) {
    Matrix h = xs;
    for (const auto& layer : layers) h = layer(h);
    return h;
}

Matrix AssembledNet::forward(const Matrix& xs) const {
    Matrix h = xs;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        Matrix next = h * layers[i].weights.transpose();
        next.rowwise() += layers[i].bias.transpose();
        h = (i + 1 < layers.size()) ? Matrix(next.cwiseMax(0.0)) : next;
    }
    return h;
}

std::vector<long> stack_atom_counts(const LayerStack& stack, double epsilon) {
    stack.validate();
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    const double rs = stack.radius + stack.margin;
    const double c = rs * rs + 1.0;
    const int depth = stack.depth();
    std::vector<long> counts(static_cast<std::size_t>(depth));
    const auto& R = stack.norms;
    double next = std::ceil(R.back() * R.back() * c / (epsilon * epsilon));
    counts.back() = static_cast<long>(std::min(next, 9.0e18));
    for (int i = depth - 2; i >= 0; --i) {
        next = std::ceil(R[static_cast<std::size_t>(i)] * R[static_cast<std::size_t>(i)] * next);
        counts[static_cast<std::size_t>(i)] = static_cast<long>(std::min(next, 9.0e18));
    }
    for (auto& n : counts) n = std::max(1L, n);
    return counts;
}

StackApproximation approximate_stack(const LayerStack& stack, double epsilon, const Matrix& samples,
                                     std::uint64_t seed, const StackApproxOptions& options) {
    const auto counts = stack_atom_counts(stack, epsilon);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > options.node_budget) {
            throw BudgetExceeded(i + 1, static_cast<std::size_t>(counts[i]),
                                 static_cast<std::size_t>(options.node_budget));
        }
    }
    if (samples.rows() > 0 && samples.cols() != stack.layers.front().input_dim()) {
        throw ShapeError("samples do not match the stack input dimension");
    }

    const int depth = stack.depth();
    const bool best_of_k = options.trials > 1 && samples.rows() > 0;
    std::vector<VectorAtomic> sparse;
    Matrix pushed = samples;
    for (int i = 0; i < depth; ++i) {
        const auto& layer = stack.layers[static_cast<std::size_t>(i)];
        const int n = static_cast<int>(counts[static_cast<std::size_t>(i)]);
        std::vector<AtomicFunction> comps;
        for (int j = 0; j < layer.output_dim(); ++j) {
            const auto& f = layer.components()[static_cast<std::size_t>(j)];
            const std::uint64_t stream = substream_seed(seed, static_cast<std::uint64_t>(i) << 20 | static_cast<std::uint64_t>(j));
            if (best_of_k) {
                comps.push_back(best_of_k_sparsify(f, n, pushed, options.trials, stream, options.jobs).approx);
            } else {
                comps.push_back(maurey_sparsify(f, n, stream));
            }
        }
        sparse.emplace_back(layer.input_dim(), std::move(comps));
        if (samples.rows() > 0) pushed = sparse.back()(pushed);
    }

    // Hidden layer i holds N_i nodes per output component of g_i, component-major.
    // Zero-mass components keep their N_i slots with coefficient 0.
    struct Block {
        Matrix inner;  // nodes x (m_i + 1): weight part then bias
        Matrix outer;  // m_{i+1} x nodes
    };
    std::vector<Block> blocks;
    for (int i = 0; i < depth; ++i) {
        const auto& g = sparse[static_cast<std::size_t>(i)];
        const long n = counts[static_cast<std::size_t>(i)];
        const Eigen::Index nodes = static_cast<Eigen::Index>(n) * g.output_dim();
        Block b{Matrix::Zero(nodes, g.input_dim() + 1), Matrix::Zero(g.output_dim(), nodes)};
        for (int j = 0; j < g.output_dim(); ++j) {
            const auto& atoms = g.components()[static_cast<std::size_t>(j)].atoms();
            for (long k = 0; k < n; ++k) {
                const Eigen::Index node = static_cast<Eigen::Index>(j) * n + k;
                if (atoms.empty()) {
                    b.inner(node, g.input_dim()) = 1.0;
                } else {
                    const auto& atom = atoms[static_cast<std::size_t>(k)];
                    b.inner.row(node) = atom.omega.transpose();
                    b.outer(j, node) = atom.coeff;
                }
            }
        }
        blocks.push_back(std::move(b));
    }

    double prod_r = 1.0;
    for (double r : stack.norms) prod_r *= r;
    const double rs = stack.radius + stack.margin;
    const double scale = std::min(1.0, prod_r * std::sqrt(rs * rs + 1.0) / std::sqrt(static_cast<double>(counts[0])));

    StackApproximation out;
    out.net.atoms_per_component = counts;
    out.net.rescale = scale;
    for (int i = 0; i <= depth; ++i) {
        DenseLayer layer;
        if (i == 0) {
            const auto& inner = blocks[0].inner;
            layer.weights = scale * inner.leftCols(inner.cols() - 1);
            layer.bias = scale * inner.col(inner.cols() - 1);
        } else if (i < depth) {
            const auto& inner = blocks[static_cast<std::size_t>(i)].inner;
            layer.weights = inner.leftCols(inner.cols() - 1) * blocks[static_cast<std::size_t>(i - 1)].outer;
            layer.bias = scale * inner.col(inner.cols() - 1);
        } else {
            layer.weights = blocks.back().outer / scale;
            layer.bias = Vector::Zero(layer.weights.rows());
        }
        if (i < depth) out.net.hidden_widths.push_back(static_cast<long>(layer.weights.rows()));
        out.net.layers.push_back(std::move(layer));
    }
    out.layers = std::move(sparse);
    return out;
}

double stack_error_constant(const LayerStack& stack) {
    stack.validate();
    const int depth = stack.depth();
    const auto& R = stack.norms;
    double tail = 0.0;
    for (int i = 1; i <= depth - 1; ++i) {
        double prod = 1.0;
        for (int j = i + 1; j <= depth; ++j) prod *= R[static_cast<std::size_t>(j - 1)] * R[static_cast<std::size_t>(j - 1)];
        tail += static_cast<double>(i) * i / prod;
    }
    if (tail == 0.0) return depth;
    double prod_r = 1.0;
    for (double r : R) prod_r *= r;
    const double r = stack.radius;
    return depth + (r + std::sqrt(r * r + 1.0) * prod_r) / stack.margin * std::sqrt(tail);
}

std::vector<std::string> assembled_violations(const AssembledNet& net, const LayerStack& stack) {
    std::vector<std::string> out;
    const int depth = stack.depth();
    if (static_cast<int>(net.layers.size()) != depth + 1) {
        out.push_back("expected " + std::to_string(depth + 1) + " weight matrices");
        return out;
    }
    // m_1 .. m_{L+1}
    std::vector<double> dims{static_cast<double>(stack.layers.front().input_dim())};
    for (const auto& layer : stack.layers) dims.push_back(layer.output_dim());
    double prod_r = 1.0;
    for (double r : stack.norms) prod_r *= r;
    const double rs = stack.radius + stack.margin;
    const double c = rs * rs + 1.0;

    auto check = [&](double value, double bound, const std::string& what) {
        if (value > bound * (1.0 + kBoundSlack)) {
            out.push_back(what + ": " + text::format_double(value) + " > " + text::format_double(bound));
        }
    };
    check(net.layers.front().weights.norm(), prod_r * std::sqrt(dims[1] * c), "|W_0->1|_F");
    for (int i = 1; i <= depth - 1; ++i) {
        check(net.layers[static_cast<std::size_t>(i)].weights.norm(), std::sqrt(dims[static_cast<std::size_t>(i + 1)]),
              "|W_" + std::to_string(i) + "->" + std::to_string(i + 1) + "|_F");
    }
    check(net.layers.back().weights.norm(), std::sqrt(c), "|W_L->L+1|_F");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& b = net.layers[i].bias;
        if (b.size() > 0) check(b.cwiseAbs().maxCoeff(), 1.0, "bias of layer " + std::to_string(i + 1));
    }
    return out;
}

}  // namespace rrf
