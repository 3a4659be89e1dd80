#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrf/linalg.hpp"

namespace rrf {

enum class Optimizer { sgd_projected, adam };

enum class Schedule { constant, inverse_sqrt };

const char* to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
    double learning_rate = 0.1;
    Schedule schedule = Schedule::constant;  // inverse_sqrt: rate / sqrt(1 + epoch)
    int batch_size = 64;
    int epochs = 50;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::sgd_projected;
    double radius = 1e3;  // Frobenius bound on the outer weights (random-feature models only)

    void validate() const;
    double rate_at(int epoch) const;
};

struct TraceRow {
    int epoch = 0;
    double loss = 0.0;    // mean training loss after the epoch
    double metric = 0.0;  // accuracy or MSE on the training set
    double outer_norm = 0.0;
};

// CSV with header epoch,loss,metric.
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out);

/// Adam moments for one parameter block (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamState {
public:
    AdamState() = default;
    AdamState(Eigen::Index rows, Eigen::Index cols);

    // In-place update of `param` given its gradient; `step` counts from 1.
    template <typename Param, typename Grad>
    void apply(Param& param, const Grad& grad, double rate, long step) {
        m_ = beta1 * m_ + (1.0 - beta1) * grad;
        v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        param.array() -= rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
    }

    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;

private:
    Eigen::MatrixXd m_;
    Eigen::MatrixXd v_;
};

}  // namespace rrf
