#pragma once

#include <cmath>
#include <random>

#include "rrf/linalg.hpp"
#include "rrf/random.hpp"

namespace testing {

inline rrf::Vector random_unit(int dim, rrf::Rng& rng) {
    std::normal_distribution<double> normal;
    rrf::Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    return v / v.norm();
}

inline rrf::Matrix uniform_box(int rows, int cols, double half_width, std::uint64_t seed) {
    rrf::Rng rng = rrf::make_rng(seed);
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    rrf::Matrix x(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) x(i, j) = unif(rng);
    }
    return x;
}

// Rows uniform in the ball of radius r in R^d.
inline rrf::Matrix uniform_ball(int rows, int d, double r, std::uint64_t seed) {
    rrf::Rng rng = rrf::make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    rrf::Matrix x(rows, d);
    for (int i = 0; i < rows; ++i) {
        x.row(i) = random_unit(d, rng).transpose() * r * std::pow(unif(rng), 1.0 / d);
    }
    return x;
}

}  // namespace testing

#include <vector>

#include "rrf/atoms.hpp"

namespace testing {

// Random atomic function with `count` atoms of random sign, unit-direction
// weights of random length in [0.5, 2], rescaled to the given total mass.
inline rrf::AtomicFunction random_atomic(int d, int count, double mass, rrf::Rng& rng) {
    std::uniform_real_distribution<double> len(0.5, 2.0), mag(0.1, 1.0);
    std::bernoulli_distribution coin;
    std::vector<rrf::Atom> atoms;
    double total = 0.0;
    for (int k = 0; k < count; ++k) {
        rrf::Vector w = random_unit(d + 1, rng) * len(rng);
        const double a = (coin(rng) ? 1.0 : -1.0) * mag(rng);
        total += std::abs(a) * w.norm();
        atoms.push_back({a, std::move(w)});
    }
    for (auto& atom : atoms) atom.coeff *= mass / total;
    return rrf::AtomicFunction(d, std::move(atoms));
}

// Stack with widths dims[0] -> dims[1] -> ... and layer norms exactly `norms`
// (every component gets mass norms[i] / sqrt(dims[i+1])).
inline rrf::LayerStack random_stack(const std::vector<int>& dims, const std::vector<double>& norms, double r,
                                    double s, int atoms, std::uint64_t seed) {
    rrf::Rng rng = rrf::make_rng(seed);
    rrf::LayerStack stack;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        std::vector<rrf::AtomicFunction> comps;
        const double mass = norms[i] / std::sqrt(static_cast<double>(dims[i + 1]));
        for (int j = 0; j < dims[i + 1]; ++j) comps.push_back(random_atomic(dims[i], atoms, mass, rng));
        stack.layers.emplace_back(dims[i], std::move(comps));
    }
    stack.radius = r;
    stack.margin = s;
    stack.norms = norms;
    return stack;
}

}  // namespace testing
