#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rrf/dataset.hpp"

namespace rrf {

struct SplitPlan {
    int folds = 5;
    std::uint64_t seed = 0;
    bool stratified = true;  // ignored for regression
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Deterministic k-fold partition. Stratified plans shuffle each class
/// separately and deal the classes round-robin, so every fold gets its share
/// of each class to within one sample.
std::vector<Fold> kfold(const Dataset& data, const SplitPlan& plan);

/// Shuffled train/test split with round(test_fraction * m) test rows.
Fold holdout_split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace rrf
