#include "rrf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rrf/dense_net.hpp"
#include "rrf/features.hpp"
#include "rrf/libsvm.hpp"
#include "rrf/parallel.hpp"
#include "rrf/random.hpp"
#include "rrf/random_feature_model.hpp"
#include "rrf/split.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

namespace pt = boost::property_tree;

template <typename T>
std::vector<T> parse_list(const std::string& raw, const std::string& key) {
    std::vector<T> out;
    for (auto part : text::split(raw, ',')) {
        part = text::trim(part);
        if (part.empty()) continue;
        T v{};
        bool ok = false;
        if constexpr (std::is_floating_point_v<T>) {
            ok = text::parse_double(part, v);
        } else {
            ok = text::parse_int(part, v);
        }
        if (!ok) throw std::invalid_argument("bad value '" + std::string(part) + "' for " + key);
        out.push_back(v);
    }
    return out;
}

template <typename T>
T parse_one(const std::string& raw, const std::string& key) {
    const auto v = parse_list<T>(raw, key);
    if (v.size() != 1) throw std::invalid_argument("expected one value for " + key);
    return v.front();
}

std::optional<NormalizeMode> normalize_from_string(const std::string& name) {
    if (name == "none" || name.empty()) return std::nullopt;
    if (name == "unit_ball") return NormalizeMode::unit_ball;
    if (name == "per_feature_standard" || name == "standard") return NormalizeMode::per_feature_standard;
    throw std::invalid_argument("unknown normalization '" + name + "'");
}

const char* normalize_name(const std::optional<NormalizeMode>& mode) {
    if (!mode) return "none";
    return *mode == NormalizeMode::unit_ball ? "unit_ball" : "per_feature_standard";
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += text::format_double(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

bool is_random_feature(Method m) { return m == Method::rrf || m == Method::rff; }

FeatureSpec feature_spec(Method method, int dim, int count, double bandwidth, std::uint64_t seed) {
    FeatureSpec spec;
    spec.kind = method == Method::rrf ? FeatureKind::relu : FeatureKind::fourier;
    spec.input_dim = dim;
    spec.count = count;
    spec.bandwidth = bandwidth;
    spec.distribution = method == Method::rrf ? FeatureDistribution{UniformSphere{}} : FeatureDistribution{Gaussian{1.0}};
    spec.seed = seed;
    return spec;
}

struct FitOutcome {
    Matrix predictions;  // on the evaluation rows
    double seconds = 0.0;
    double zero_fraction = 0.0;
};

// Trains one model on `train` and predicts on `eval`.
FitOutcome fit_and_predict(const ExperimentConfig& cfg, Method method, long width, double bandwidth, double rate,
                           const Dataset& train, const Dataset& eval, std::uint64_t seed) {
    const TrainConfig tc = cfg.train_config(method, rate, seed);
    FitOutcome out;
    if (is_random_feature(method)) {
        const FeatureBank bank = FeatureBank::sample(
            feature_spec(method, train.dim(), static_cast<int>(width), bandwidth, substream_seed(seed, 1)));
        const FeatureMatrix phi = compute_features(train.x, bank);
        out.zero_fraction = phi.zero_fraction();
        auto res = train_on_features(bank, phi, train, cfg.loss, tc);
        out.seconds = res.train_seconds;
        out.predictions = res.model.predict(eval.x);
    } else {
        std::vector<int> hidden(method == Method::dense2 ? 1 : 2, static_cast<int>(width));
        DenseNet net = DenseNet::init(train.dim(), hidden, output_width(cfg.loss, train), substream_seed(seed, 2));
        auto res = dense_train(std::move(net), train, cfg.loss, tc);
        out.seconds = res.train_seconds;
        out.predictions = dense_forward(res.net, eval.x);
    }
    return out;
}

ResultRecord base_record(const ExperimentConfig& cfg, const std::string& hash, const Dataset& data, Method method) {
    ResultRecord r;
    r.config_hash = hash;
    r.method = to_string(method);
    r.dataset = data.name;
    r.metric = data.task == Task::regression ? "mse" : "accuracy";
    (void)cfg;
    return r;
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::rrf: return "rrf";
        case Method::rff: return "rff";
        case Method::dense2: return "dense2";
        case Method::dense3: return "dense3";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "rrf") return Method::rrf;
    if (name == "rff") return Method::rff;
    if (name == "dense2") return Method::dense2;
    if (name == "dense3") return Method::dense3;
    throw std::invalid_argument("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (mode != "grid" && mode != "depth") throw std::invalid_argument("mode must be grid or depth");
    if (methods.empty()) throw std::invalid_argument("no methods configured");
    if (bandwidths.empty() || learning_rates.empty()) throw std::invalid_argument("grids must be nonempty");
    for (double b : bandwidths) {
        if (!(b > 0.0)) throw std::invalid_argument("bandwidths must be > 0");
    }
    for (double r : learning_rates) {
        if (!(r >= 0.0)) throw std::invalid_argument("learning rates must be >= 0");
    }
    if (mode == "grid") {
        if (features.empty()) throw std::invalid_argument("feature list must be nonempty");
        if (folds < 2) throw std::invalid_argument("need at least 2 folds");
    } else {
        if (budgets.empty()) throw std::invalid_argument("budget list must be nonempty");
        if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test fraction must be in (0, 1)");
    }
    for (int n : features) {
        if (n < 1) throw std::invalid_argument("feature counts must be >= 1");
    }
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (const auto& [m, s] : overrides) {
        (void)m;
        for (double r : s.learning_rates) {
            if (!(r >= 0.0)) throw std::invalid_argument("learning rates must be >= 0");
        }
    }
    train_config(methods.front(), learning_rates.front(), 0).validate();
}

std::string ExperimentConfig::hash() const {
    std::ostringstream s;
    s << mode << '|' << data.generator << '|' << data.kind << '|' << data.samples << '|' << data.dim << '|'
      << data.path << '|' << data.libsvm_dim << '|' << normalize_name(data.normalize) << '|';
    for (auto m : methods) s << to_string(m) << ',';
    s << '|' << to_string(loss) << '|' << join(features) << '|' << join(bandwidths) << '|' << join(learning_rates)
      << '|' << text::format_double(radius) << '|' << epochs << '|' << batch_size << '|' << to_string(optimizer)
      << '|' << static_cast<int>(schedule) << '|' << folds << '|' << trials << '|' << seed << '|' << join(budgets)
      << '|' << text::format_double(test_fraction) << '|' << text::format_double(validation_fraction);
    for (const auto& [m, o] : overrides) {
        s << '|' << to_string(m) << ':' << join(o.learning_rates) << ':' << o.epochs.value_or(-1) << ':'
          << o.batch_size.value_or(-1) << ':' << (o.optimizer ? to_string(*o.optimizer) : "-");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
    return buf;
}

TrainConfig ExperimentConfig::train_config(Method method, double learning_rate, std::uint64_t run_seed) const {
    TrainConfig tc;
    tc.learning_rate = learning_rate;
    tc.schedule = schedule;
    tc.batch_size = batch_size;
    tc.epochs = epochs;
    tc.seed = run_seed;
    tc.optimizer = is_random_feature(method) ? optimizer : Optimizer::adam;
    tc.radius = radius;
    if (auto it = overrides.find(method); it != overrides.end()) {
        if (it->second.epochs) tc.epochs = *it->second.epochs;
        if (it->second.batch_size) tc.batch_size = *it->second.batch_size;
        if (it->second.optimizer) tc.optimizer = *it->second.optimizer;
    }
    return tc;
}

std::vector<double> ExperimentConfig::rates_for(Method method) const {
    if (auto it = overrides.find(method); it != overrides.end() && !it->second.learning_rates.empty()) {
        return it->second.learning_rates;
    }
    return learning_rates;
}

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    for (const auto& [key, node] : tree) {
        const std::string value = node.data();
        if (node.empty()) {
            if (key == "mode") cfg.mode = value;
            else if (key == "seed") cfg.seed = parse_one<std::uint64_t>(value, key);
            else throw std::invalid_argument("unknown top-level key '" + key + "'");
            continue;
        }
        for (const auto& [k, leaf] : node) {
            const std::string v = leaf.data();
            const std::string where = key + "." + k;
            if (key == "data") {
                if (k == "generator") cfg.data.generator = v;
                else if (k == "kind") cfg.data.kind = v;
                else if (k == "samples") cfg.data.samples = parse_one<int>(v, where);
                else if (k == "dim") cfg.data.dim = parse_one<int>(v, where);
                else if (k == "path") cfg.data.path = v;
                else if (k == "libsvm_dim") cfg.data.libsvm_dim = parse_one<int>(v, where);
                else if (k == "normalize") cfg.data.normalize = normalize_from_string(v);
                else throw std::invalid_argument("unknown key '" + where + "'");
            } else if (key == "model") {
                if (k == "methods") {
                    cfg.methods.clear();
                    for (auto part : text::split(v, ',')) {
                        if (!text::trim(part).empty()) cfg.methods.push_back(method_from_string(std::string(text::trim(part))));
                    }
                } else if (k == "loss") cfg.loss = loss_kind_from_string(v);
                else if (k == "features") cfg.features = parse_list<int>(v, where);
                else if (k == "radius") cfg.radius = parse_one<double>(v, where);
                else if (k == "epochs") cfg.epochs = parse_one<int>(v, where);
                else if (k == "batch_size") cfg.batch_size = parse_one<int>(v, where);
                else if (k == "optimizer") cfg.optimizer = optimizer_from_string(v);
                else if (k == "schedule") {
                    if (v == "constant") cfg.schedule = Schedule::constant;
                    else if (v == "inverse_sqrt") cfg.schedule = Schedule::inverse_sqrt;
                    else throw std::invalid_argument("unknown schedule '" + v + "'");
                } else throw std::invalid_argument("unknown key '" + where + "'");
            } else if (key == "grid") {
                if (k == "bandwidths") cfg.bandwidths = parse_list<double>(v, where);
                else if (k == "learning_rates") cfg.learning_rates = parse_list<double>(v, where);
                else throw std::invalid_argument("unknown key '" + where + "'");
            } else if (key == "cv") {
                if (k == "folds") cfg.folds = parse_one<int>(v, where);
                else if (k == "trials") cfg.trials = parse_one<int>(v, where);
                else throw std::invalid_argument("unknown key '" + where + "'");
            } else if (key == "depth") {
                if (k == "budgets") cfg.budgets = parse_list<long>(v, where);
                else if (k == "test_fraction") cfg.test_fraction = parse_one<double>(v, where);
                else if (k == "validation_fraction") cfg.validation_fraction = parse_one<double>(v, where);
                else throw std::invalid_argument("unknown key '" + where + "'");
            } else if (key == "rrf" || key == "rff" || key == "dense2" || key == "dense3") {
                auto& o = cfg.overrides[method_from_string(key)];
                if (k == "learning_rates") o.learning_rates = parse_list<double>(v, where);
                else if (k == "epochs") o.epochs = parse_one<int>(v, where);
                else if (k == "batch_size") o.batch_size = parse_one<int>(v, where);
                else if (k == "optimizer") o.optimizer = optimizer_from_string(v);
                else throw std::invalid_argument("unknown key '" + where + "'");
            } else {
                throw std::invalid_argument("unknown section [" + key + "]");
            }
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    return parse_config(in);
}

Dataset load_dataset(const DatasetSource& source, std::uint64_t seed) {
    Dataset data;
    if (source.generator == "grid2d") {
        data = gen_grid2d(grid2d_kind_from_string(source.kind), source.samples, seed);
    } else if (source.generator == "daniely") {
        data = gen_daniely(source.dim, source.samples, seed);
    } else if (source.generator == "libsvm") {
        LibsvmOptions opts;
        opts.dim = source.libsvm_dim;
        data = load_libsvm(source.path, opts);
    } else {
        throw std::invalid_argument("unknown data generator '" + source.generator + "'");
    }
    if (source.normalize) data = normalize(data, *source.normalize);
    return data;
}

std::vector<ResultRecord> run_grid(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const std::string hash = cfg.hash();
    const Dataset data = load_dataset(cfg.data, substream_seed(cfg.seed, 0xda7a));

    struct Cell {
        Method method;
        int features;
        double bandwidth;
        double rate;
        int trial;
        std::string key;
    };
    std::vector<Cell> cells;
    for (Method method : cfg.methods) {
        const std::vector<double> bws = is_random_feature(method) ? cfg.bandwidths : std::vector<double>{0.0};
        for (int n : cfg.features) {
            for (double bw : bws) {
                for (double rate : cfg.rates_for(method)) {
                    for (int trial = 0; trial < cfg.trials; ++trial) {
                        std::string key = std::string(to_string(method)) + "/N=" + std::to_string(n) +
                                          "/bw=" + text::format_double(bw) + "/lr=" + text::format_double(rate) +
                                          "/trial=" + std::to_string(trial);
                        cells.push_back({method, n, bw, rate, trial, std::move(key)});
                    }
                }
            }
        }
    }

    std::vector<std::optional<ResultRecord>> slots(cells.size());
    std::mutex writer;
    parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        const Cell& cell = cells[i];
        if (options.skip.count(cell.key)) return;
        ResultRecord r = base_record(cfg, hash, data, cell.method);
        r.cell_key = cell.key;
        r.features = cell.method == Method::dense3
                         ? matched_width_3layer(shallow_parameter_count(cell.features, data.dim()), data.dim())
                         : cell.features;
        r.bandwidth = cell.bandwidth;
        r.learning_rate = cell.rate;
        r.trial = cell.trial;
        r.seed = substream_seed(cfg.seed, i);

        SplitPlan plan{cfg.folds, substream_seed(cfg.seed, 0xf01d00ULL + static_cast<std::uint64_t>(cell.trial)), true};
        const auto folds = kfold(data, plan);
        double zero_total = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const Dataset train = data.subset(folds[f].train);
            const Dataset valid = data.subset(folds[f].validation);
            try {
                const auto fit = fit_and_predict(cfg, cell.method, r.features, cell.bandwidth, cell.rate, train, valid,
                                                 substream_seed(r.seed, f));
                r.fold_metrics.push_back(task_metric(data.task, fit.predictions, valid.y));
                r.seconds += fit.seconds;
                zero_total += fit.zero_fraction;
            } catch (const std::exception& e) {
                r.error = "fold " + std::to_string(f) + ": " + e.what();
                break;
            }
        }
        if (!r.fold_metrics.empty()) r.zero_fraction = zero_total / static_cast<double>(r.fold_metrics.size());
        summarize(r);
        if (options.on_record) {
            std::lock_guard<std::mutex> lock(writer);
            options.on_record(r);
        }
        slots[i] = std::move(r);
    });

    std::vector<ResultRecord> out;
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    flag_best(out);
    return out;
}

std::vector<ResultRecord> run_depth_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const std::string hash = cfg.hash();
    const Dataset data = load_dataset(cfg.data, substream_seed(cfg.seed, 0xda7a));
    const int d = data.dim();

    struct Cell {
        Method method;
        long budget;
        int trial;
        std::string key;
    };
    std::vector<Cell> cells;
    for (long budget : cfg.budgets) {
        for (int trial = 0; trial < cfg.trials; ++trial) {
            for (Method method : cfg.methods) {
                cells.push_back({method, budget, trial,
                                 std::string(to_string(method)) + "/budget=" + std::to_string(budget) + "/trial=" +
                                     std::to_string(trial)});
            }
        }
    }

    std::vector<std::optional<ResultRecord>> slots(cells.size());
    std::mutex writer;
    parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        const Cell& cell = cells[i];
        if (options.skip.count(cell.key)) return;
        ResultRecord r = base_record(cfg, hash, data, cell.method);
        r.cell_key = cell.key;
        r.budget = cell.budget;
        r.trial = cell.trial;
        r.bandwidth = is_random_feature(cell.method) ? cfg.bandwidths.front() : 0.0;
        // Seeds depend on (budget, trial, method) only, not on the position in the sweep.
        r.seed = substream_seed(substream_seed(cfg.seed, static_cast<std::uint64_t>(cell.budget)),
                                static_cast<std::uint64_t>(cell.trial) * 8 + static_cast<std::uint64_t>(cell.method));
        try {
            r.features = cell.method == Method::dense3
                             ? matched_width_3layer(shallow_parameter_count(cell.budget, d), d)
                             : cell.budget;
            const Fold split = holdout_split(data, cfg.test_fraction,
                                             substream_seed(cfg.seed, 0x7e57000ULL + static_cast<std::uint64_t>(cell.trial)));
            const Dataset train = data.subset(split.train);
            const Dataset test = data.subset(split.validation);

            const auto rates = cfg.rates_for(cell.method);
            double rate = rates.front();
            if (rates.size() > 1) {
                // Pick the rate on a holdout carved from the training side.
                const Fold inner = holdout_split(train, cfg.validation_fraction, substream_seed(r.seed, 0x5e1ec7));
                const Dataset fit = train.subset(inner.train);
                const Dataset valid = train.subset(inner.validation);
                double best = std::numeric_limits<double>::infinity();
                for (double candidate : rates) {
                    double score = std::numeric_limits<double>::infinity();
                    try {
                        const auto o = fit_and_predict(cfg, cell.method, r.features, r.bandwidth, candidate, fit, valid, r.seed);
                        score = task_metric(data.task, o.predictions, valid.y);
                        if (data.task != Task::regression) score = -score;
                    } catch (const std::exception&) {
                    }
                    if (score < best) {
                        best = score;
                        rate = candidate;
                    }
                }
            }
            r.learning_rate = rate;
            const auto o = fit_and_predict(cfg, cell.method, r.features, r.bandwidth, rate, train, test, r.seed);
            r.fold_metrics.push_back(task_metric(data.task, o.predictions, test.y));
            r.seconds = o.seconds;
            r.zero_fraction = o.zero_fraction;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        summarize(r);
        if (options.on_record) {
            std::lock_guard<std::mutex> lock(writer);
            options.on_record(r);
        }
        slots[i] = std::move(r);
    });

    std::vector<ResultRecord> out;
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    flag_best(out);
    return out;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    return cfg.mode == "depth" ? run_depth_sweep(cfg, options) : run_grid(cfg, options);
}

void flag_best(std::vector<ResultRecord>& records) {
    std::map<std::string, std::size_t> best;
    auto group = [](const ResultRecord& r) {
        return r.config_hash + '|' + r.method + '|' + std::to_string(r.features) + '|' + text::format_double(r.bandwidth) +
               '|' + std::to_string(r.trial) + '|' + std::to_string(r.budget);
    };
    auto better = [](const ResultRecord& a, const ResultRecord& b) {
        return a.metric == "mse" ? a.mean < b.mean : a.mean > b.mean;
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].best = false;
        if (!records[i].error.empty() || records[i].fold_metrics.empty()) continue;
        const auto key = group(records[i]);
        auto it = best.find(key);
        if (it == best.end() || better(records[i], records[it->second])) best[key] = i;
    }
    for (const auto& [key, idx] : best) records[idx].best = true;
}

}  // namespace rrf
