// Grid-search / depth-sweep runner. Writes one record per evaluated cell.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "rrf/experiment.hpp"
#include "rrf/results.hpp"

namespace fs = std::filesystem;

namespace {

// Rewrites the whole file through a temporary so a crash never leaves a torn
// output behind.
void flush(const std::vector<rrf::ResultRecord>& records, const std::string& path, rrf::ResultFormat format) {
    const std::string tmp = path + ".tmp";
    rrf::emit_results(records, tmp, format);
    fs::rename(tmp, path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random ReLU feature experiments: grid search with k-fold CV, or depth sweep"};
    std::string config_path;
    std::string out_path;
    std::string format_name = "csv";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    bool resume = false;
    app.add_option("--config", config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "result file")->required();
    app.add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the config seed");
    app.add_flag("--resume", resume, "skip cells already present in --out for this config");
    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = rrf::load_config(config_path);
        if (seed) cfg.seed = *seed;
        const auto format = rrf::result_format_from_string(format_name);
        const std::string hash = cfg.hash();

        std::vector<rrf::ResultRecord> kept;  // records from other configs or finished cells
        rrf::RunOptions options;
        options.jobs = jobs;
        if (resume && fs::exists(out_path)) {
            for (auto& r : rrf::load_results(out_path, format)) {
                if (r.config_hash == hash) {
                    if (!r.error.empty()) continue;  // retry failed cells
                    options.skip.insert(r.cell_key);
                }
                kept.push_back(std::move(r));
            }
            std::cerr << "resume: " << options.skip.size() << " cells already done\n";
        }

        std::vector<rrf::ResultRecord> all = kept;
        options.on_record = [&](const rrf::ResultRecord& r) {
            all.push_back(r);
            flush(all, out_path, format);
            std::cerr << r.cell_key << "  " << r.metric << '=' << r.mean;
            if (!r.error.empty()) std::cerr << "  error: " << r.error;
            std::cerr << '\n';
        };

        auto fresh = rrf::run_experiment(cfg, options);

        // Final file: earlier records first, then this run's in cell order.
        all = kept;
        all.insert(all.end(), fresh.begin(), fresh.end());
        rrf::flag_best(all);
        flush(all, out_path, format);

        std::size_t failed = 0;
        for (const auto& r : all) {
            if (r.config_hash == hash && !r.error.empty()) ++failed;
        }
        std::cerr << fresh.size() << " cells run, " << failed << " with errors -> " << out_path << '\n';
        return failed ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "rrf_run: " << e.what() << '\n';
        return 1;
    }
}
