#include "rrf/optim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rrf/text.hpp"

namespace rrf {

const char* to_string(Optimizer opt) { return opt == Optimizer::adam ? "adam" : "sgd_projected"; }

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "adam") return Optimizer::adam;
    if (name == "sgd" || name == "sgd_projected") return Optimizer::sgd_projected;
    throw std::invalid_argument("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be finite and >= 0");
    }
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(radius > 0.0)) throw std::invalid_argument("projection radius must be > 0");
}

double TrainConfig::rate_at(int epoch) const {
    return schedule == Schedule::constant ? learning_rate : learning_rate / std::sqrt(1.0 + epoch);
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out) {
    out << "epoch,loss,metric\n";
    for (const auto& row : trace) {
        out << row.epoch << ',' << text::format_double(row.loss) << ',' << text::format_double(row.metric) << '\n';
    }
}

AdamState::AdamState(Eigen::Index rows, Eigen::Index cols)
    : m_(Eigen::MatrixXd::Zero(rows, cols)), v_(Eigen::MatrixXd::Zero(rows, cols)) {}

}  // namespace rrf
