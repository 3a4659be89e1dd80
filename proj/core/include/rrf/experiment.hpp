#pragma once

#include <cstdint>
#include <iosfwd>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rrf/dataset.hpp"
#include "rrf/loss.hpp"
#include "rrf/optim.hpp"
#include "rrf/results.hpp"

namespace rrf {

enum class Method { rrf, rff, dense2, dense3 };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

struct DatasetSource {
    std::string generator = "grid2d";  // grid2d | daniely | libsvm
    std::string kind = "sine";         // grid2d kind
    int samples = 2000;
    int dim = 2;                       // daniely half-dimension
    std::string path;                  // libsvm file
    int libsvm_dim = 0;
    std::optional<NormalizeMode> normalize;
};

/// Per-method training settings; unset fields fall back to the shared ones.
struct MethodSettings {
    std::vector<double> learning_rates;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<Optimizer> optimizer;
};

struct ExperimentConfig {
    std::string mode = "grid";  // grid | depth
    DatasetSource data;
    std::vector<Method> methods{Method::rrf, Method::rff};
    LossKind loss = LossKind::hinge;
    std::vector<int> features{20};
    std::vector<double> bandwidths{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> learning_rates{0.001, 0.01, 0.1, 1.0};
    double radius = 1e3;
    int epochs = 50;
    int batch_size = 64;
    Optimizer optimizer = Optimizer::sgd_projected;
    Schedule schedule = Schedule::constant;
    int folds = 5;
    int trials = 10;
    std::uint64_t seed = 0;
    std::vector<long> budgets{20, 40, 80, 160, 320, 640, 1280, 2560, 5120};
    double test_fraction = 0.2;
    double validation_fraction = 0.2;  // holdout used to pick a rate when several are given (depth mode)
    std::map<Method, MethodSettings> overrides;

    void validate() const;

    /// Stable hex digest of every field that affects results.
    std::string hash() const;

    TrainConfig train_config(Method method, double learning_rate, std::uint64_t seed) const;
    std::vector<double> rates_for(Method method) const;
};

/// Flat key-value config with [sections]: top-level mode/seed, [data], [model],
/// [grid], [cv], [depth], and optional per-method [rrf]/[rff]/[dense2]/[dense3].
/// Lists are comma separated. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

Dataset load_dataset(const DatasetSource& source, std::uint64_t seed);

struct RunOptions {
    unsigned jobs = 1;
    std::set<std::string> skip;  // cell keys already present (resume)
    // Called once per finished cell, serialized under a lock.
    std::function<void(const ResultRecord&)> on_record;
};

/// k-fold CV over every (method, N, bandwidth, learning rate, trial) cell.
/// Dense methods ignore the bandwidth grid. Training failures are recorded in
/// the row's error field. Records come back in cell order regardless of jobs.
std::vector<ResultRecord> run_grid(const ExperimentConfig& cfg, const RunOptions& options = {});

/// For every budget level N and trial: rrf with N features, dense2 with N
/// hidden units and dense3 with the matched equal width, each scored by
/// test MSE on a held-out split.
std::vector<ResultRecord> run_depth_sweep(const ExperimentConfig& cfg, const RunOptions& options = {});

// Runs whichever sweep cfg.mode names.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Marks, within each (method, features, bandwidth, trial, budget) group, the
/// record with the best mean (highest accuracy or lowest MSE).
void flag_best(std::vector<ResultRecord>& records);

}  // namespace rrf
