#include "rrf/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rrf/errors.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kColumns[] = {"config_hash", "cell_key", "method", "dataset", "budget", "features",
                                    "bandwidth", "learning_rate", "trial", "seed", "metric", "mean", "std",
                                    "seconds", "zero_fraction", "best", "error", "fold_metrics"};
constexpr std::size_t kColumnCount = sizeof(kColumns) / sizeof(kColumns[0]);

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError("unterminated quote", line_no);
    out.push_back(std::move(cur));
    return out;
}

json record_json(const ResultRecord& r) {
    return json{{"config_hash", r.config_hash}, {"cell_key", r.cell_key}, {"method", r.method},
                {"dataset", r.dataset},         {"budget", r.budget},     {"features", r.features},
                {"bandwidth", r.bandwidth},     {"learning_rate", r.learning_rate},
                {"trial", r.trial},             {"seed", r.seed},         {"metric", r.metric},
                {"mean", r.mean},               {"std", r.stddev},        {"seconds", r.seconds},
                {"zero_fraction", r.zero_fraction}, {"best", r.best},     {"error", r.error},
                {"fold_metrics", r.fold_metrics}};
}

ResultRecord record_from(const json& j) {
    ResultRecord r;
    j.at("config_hash").get_to(r.config_hash);
    j.at("cell_key").get_to(r.cell_key);
    j.at("method").get_to(r.method);
    j.at("dataset").get_to(r.dataset);
    j.at("budget").get_to(r.budget);
    j.at("features").get_to(r.features);
    j.at("bandwidth").get_to(r.bandwidth);
    j.at("learning_rate").get_to(r.learning_rate);
    j.at("trial").get_to(r.trial);
    j.at("seed").get_to(r.seed);
    j.at("metric").get_to(r.metric);
    j.at("mean").get_to(r.mean);
    j.at("std").get_to(r.stddev);
    j.at("seconds").get_to(r.seconds);
    j.at("zero_fraction").get_to(r.zero_fraction);
    j.at("best").get_to(r.best);
    j.at("error").get_to(r.error);
    j.at("fold_metrics").get_to(r.fold_metrics);
    return r;
}

template <typename T>
T field_number(const std::string& s, std::size_t line_no, const char* name) {
    T v{};
    bool ok = false;
    if constexpr (std::is_floating_point_v<T>) {
        ok = text::parse_double(s, v);
    } else {
        ok = text::parse_int(s, v);
    }
    if (!ok) throw ParseError(std::string("bad value for ") + name + ": '" + s + "'", line_no);
    return v;
}

}  // namespace

ResultFormat result_format_from_string(const std::string& name) {
    if (name == "csv") return ResultFormat::csv;
    if (name == "json") return ResultFormat::json;
    throw std::invalid_argument("unknown result format '" + name + "'");
}

void summarize(ResultRecord& record) {
    const auto& v = record.fold_metrics;
    if (v.empty()) {
        record.mean = 0.0;
        record.stddev = 0.0;
        return;
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    record.mean = mean;
    record.stddev = std::sqrt(var / static_cast<double>(v.size()));
}

void write_results(const std::vector<ResultRecord>& records, std::ostream& out, ResultFormat format) {
    if (format == ResultFormat::json) {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(record_json(r));
        out << arr.dump(1) << '\n';
        return;
    }
    for (std::size_t c = 0; c < kColumnCount; ++c) out << (c ? "," : "") << kColumns[c];
    out << '\n';
    using text::format_double;
    for (const auto& r : records) {
        std::string folds;
        for (std::size_t i = 0; i < r.fold_metrics.size(); ++i) folds += (i ? ";" : "") + format_double(r.fold_metrics[i]);
        out << csv_field(r.config_hash) << ',' << csv_field(r.cell_key) << ',' << csv_field(r.method) << ','
            << csv_field(r.dataset) << ',' << r.budget << ',' << r.features << ',' << format_double(r.bandwidth) << ','
            << format_double(r.learning_rate) << ',' << r.trial << ',' << r.seed << ',' << csv_field(r.metric) << ','
            << format_double(r.mean) << ',' << format_double(r.stddev) << ',' << format_double(r.seconds) << ','
            << format_double(r.zero_fraction) << ',' << (r.best ? 1 : 0) << ',' << csv_field(r.error) << ','
            << folds << '\n';
    }
}

std::vector<ResultRecord> read_results(std::istream& in, ResultFormat format) {
    std::vector<ResultRecord> out;
    if (format == ResultFormat::json) {
        std::stringstream buf;
        buf << in.rdbuf();
        if (text::trim(buf.str()).empty()) return out;
        try {
            for (const auto& j : json::parse(buf.str())) out.push_back(record_from(j));
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed results JSON: ") + e.what(), 1);
        }
        return out;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t first_line = line_no;
        // An odd quote count means a quoted field runs onto the next line.
        std::string next;
        while (std::count(line.begin(), line.end(), '"') % 2 == 1 && std::getline(in, next)) {
            line += '\n' + next;
            ++line_no;
        }
        if (first_line == 1 || text::trim(line).empty()) continue;
        const auto f = csv_split(line, first_line);
        if (f.size() != kColumnCount) throw ParseError("expected " + std::to_string(kColumnCount) + " columns", first_line);
        ResultRecord r;
        r.config_hash = f[0];
        r.cell_key = f[1];
        r.method = f[2];
        r.dataset = f[3];
        r.budget = field_number<long>(f[4], first_line, "budget");
        r.features = field_number<long>(f[5], first_line, "features");
        r.bandwidth = field_number<double>(f[6], first_line, "bandwidth");
        r.learning_rate = field_number<double>(f[7], first_line, "learning_rate");
        r.trial = field_number<int>(f[8], first_line, "trial");
        r.seed = field_number<std::uint64_t>(f[9], first_line, "seed");
        r.metric = f[10];
        r.mean = field_number<double>(f[11], first_line, "mean");
        r.stddev = field_number<double>(f[12], first_line, "std");
        r.seconds = field_number<double>(f[13], first_line, "seconds");
        r.zero_fraction = field_number<double>(f[14], first_line, "zero_fraction");
        r.best = f[15] == "1";
        r.error = f[16];
        if (!f[17].empty()) {
            for (auto part : text::split(f[17], ';')) r.fold_metrics.push_back(field_number<double>(std::string(part), first_line, "fold_metrics"));
        }
        out.push_back(std::move(r));
    }
    return out;
}

void emit_results(const std::vector<ResultRecord>& records, const std::string& path, ResultFormat format) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_results(records, out, format);
    out.flush();
    if (!out) throw std::runtime_error("failed writing results to '" + path + "'");
}

std::vector<ResultRecord> load_results(const std::string& path, ResultFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_results(in, format);
}

}  // namespace rrf
