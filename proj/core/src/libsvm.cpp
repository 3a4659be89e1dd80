#include "rrf/libsvm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rrf/errors.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

struct SparseRow {
    double label = 0.0;
    std::vector<std::pair<int, double>> entries;
};

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options, std::string name) {
    std::vector<SparseRow> rows;
    int max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = text::trim(line);
        if (body.empty()) continue;

        SparseRow row;
        bool first = true;
        int last_index = 0;
        for (auto token : text::split(body, ' ')) {
            token = text::trim(token);
            if (token.empty()) continue;
            if (first) {
                if (!text::parse_double(token, row.label)) throw ParseError("bad label '" + std::string(token) + "'", line_no);
                first = false;
                continue;
            }
            const auto colon = token.find(':');
            int index = 0;
            double value = 0.0;
            if (colon == std::string_view::npos || !text::parse_int(token.substr(0, colon), index) ||
                !text::parse_double(token.substr(colon + 1), value)) {
                throw ParseError("malformed feature '" + std::string(token) + "'", line_no);
            }
            if (index < 1) throw ParseError("feature indices are 1-based", line_no);
            if (index <= last_index) throw ParseError("feature indices must increase", line_no);
            if (options.dim > 0 && index > options.dim) {
                throw ParseError("feature index " + std::to_string(index) + " exceeds dimension " +
                                     std::to_string(options.dim), line_no);
            }
            last_index = index;
            max_index = std::max(max_index, index);
            row.entries.emplace_back(index, value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no samples in libsvm input", line_no);

    const int dim = options.dim > 0 ? options.dim : std::max(1, max_index);
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), dim);
    Vector raw(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        raw[static_cast<Eigen::Index>(i)] = rows[i].label;
        for (const auto& [index, value] : rows[i].entries) x(static_cast<Eigen::Index>(i), index - 1) = value;
    }

    std::map<double, int> classes;
    bool integral = true;
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        classes.emplace(raw[i], 0);
        integral = integral && raw[i] == std::floor(raw[i]);
    }
    Task task = options.task.value_or(classes.size() == 2 ? Task::binary
                                      : integral          ? Task::multiclass
                                                          : Task::regression);
    Vector y = raw;
    if (task == Task::binary) {
        if (classes.size() > 2) throw LabelError("binary task but " + std::to_string(classes.size()) + " labels");
        const double negative = classes.begin()->first;
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = (classes.size() == 2 && raw[i] == negative) ? -1.0 : 1.0;
        if (classes.size() == 1) y.setConstant(raw[0] < 0.0 ? -1.0 : 1.0);
    } else if (task == Task::multiclass) {
        int next = 0;
        for (auto& [label, index] : classes) index = next++;
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = classes.at(raw[i]);
    }
    return Dataset::make(std::move(x), std::move(y), task, std::move(name));
}

Dataset load_libsvm(const std::string& path, const LibsvmOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open libsvm file '" + path + "'");
    auto name = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    return parse_libsvm(in, options, std::move(name));
}

void write_libsvm(const Dataset& data, std::ostream& out) {
    for (int i = 0; i < data.size(); ++i) {
        out << text::format_double(data.y[i]);
        for (int j = 0; j < data.dim(); ++j) {
            if (data.x(i, j) != 0.0) out << ' ' << (j + 1) << ':' << text::format_double(data.x(i, j));
        }
        out << '\n';
    }
}

}  // namespace rrf
