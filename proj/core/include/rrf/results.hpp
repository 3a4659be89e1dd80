#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rrf {

enum class ResultFormat { csv, json };

ResultFormat result_format_from_string(const std::string& name);

/// One evaluated grid cell (or one depth-sweep model at one budget and trial).
struct ResultRecord {
    std::string config_hash;
    std::string cell_key;  // unique within a config; used for resuming
    std::string method;
    std::string dataset;
    long budget = 0;       // parameter-budget level (depth sweep) or 0
    long features = 0;     // N for random features / dense2, width for dense3
    double bandwidth = 0.0;
    double learning_rate = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string metric;    // "accuracy" or "mse"
    std::vector<double> fold_metrics;
    double mean = 0.0;
    double stddev = 0.0;
    double seconds = 0.0;  // training wall clock, feature generation excluded
    double zero_fraction = 0.0;
    bool best = false;
    std::string error;     // empty unless a fold failed

    bool operator==(const ResultRecord&) const = default;
};

/// Fixed column order, one row per record. Fold metrics are ';'-joined in CSV.
void write_results(const std::vector<ResultRecord>& records, std::ostream& out, ResultFormat format);
std::vector<ResultRecord> read_results(std::istream& in, ResultFormat format);

/// Writes to `path`; I/O failures throw std::runtime_error naming the path.
void emit_results(const std::vector<ResultRecord>& records, const std::string& path, ResultFormat format);
std::vector<ResultRecord> load_results(const std::string& path, ResultFormat format);

// Fills mean and (population) stddev from fold_metrics.
void summarize(ResultRecord& record);

}  // namespace rrf
