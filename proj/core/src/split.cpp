#include "rrf/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rrf/random.hpp"

namespace rrf {

std::vector<Fold> kfold(const Dataset& data, const SplitPlan& plan) {
    const auto m = static_cast<std::size_t>(data.size());
    if (plan.folds < 2) throw std::invalid_argument("need at least 2 folds");
    if (static_cast<std::size_t>(plan.folds) > m) {
        throw std::invalid_argument("more folds (" + std::to_string(plan.folds) + ") than samples (" +
                                    std::to_string(m) + ")");
    }
    Rng rng = make_rng(plan.seed);

    // Classes in label order, each shuffled, then dealt round-robin.
    std::map<double, std::vector<std::size_t>> groups;
    const bool stratify = plan.stratified && data.task != Task::regression;
    for (std::size_t i = 0; i < m; ++i) groups[stratify ? data.y[static_cast<Eigen::Index>(i)] : 0.0].push_back(i);

    const auto k = static_cast<std::size_t>(plan.folds);
    std::vector<Fold> folds(k);
    std::size_t dealt = 0;
    for (auto& [label, members] : groups) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) folds[dealt++ % k].validation.push_back(idx);
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
        std::vector<char> held(m, 0);
        for (std::size_t idx : folds[f].validation) held[idx] = 1;
        for (std::size_t i = 0; i < m; ++i) {
            if (!held[i]) folds[f].train.push_back(i);
        }
    }
    return folds;
}

Fold holdout_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test fraction must be in (0, 1)");
    const auto m = static_cast<std::size_t>(data.size());
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
    if (n_test == 0 || n_test >= m) throw std::invalid_argument("split leaves an empty side");
    Fold out;
    out.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.train.begin(), out.train.end());
    return out;
}

}  // namespace rrf
