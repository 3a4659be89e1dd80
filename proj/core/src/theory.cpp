#include "rrf/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace rrf {

TheoryCounts theory_counts(double rkhs_norm, double radius, double epsilon, double delta) {
    if (!(rkhs_norm > 0.0 && radius > 0.0 && epsilon > 0.0 && delta > 0.0)) {
        throw std::invalid_argument("all arguments must be positive");
    }
    if (!(delta < 1.0)) throw std::invalid_argument("delta must be < 1");
    const double lift = radius * radius + 1.0;
    const double m = (4.0 + 2.0 * std::sqrt(2.0 * std::log(1.0 / delta))) * rkhs_norm * (std::sqrt(lift) + 1.0) / epsilon;
    const double n = 5.0 * lift / (epsilon * epsilon) * std::log(16.0 * lift / (epsilon * epsilon * delta));
    return {static_cast<long>(std::ceil(m * m)), static_cast<long>(std::ceil(n))};
}

}  // namespace rrf
