#pragma once

namespace rrf {

struct TheoryCounts {
    long samples = 0;   // m
    long features = 0;  // N
};

/// Sample and feature counts sufficient for excess risk 3 eps with probability
/// 1 - 2 delta when the target has RKHS norm below R on data of radius r:
///   m >= [(4 + 2 sqrt(2 ln(1/delta))) R (sqrt(r^2+1) + 1) / eps]^2
///   N >= 5 (r^2+1) / eps^2 * ln(16 (r^2+1) / (eps^2 delta))
TheoryCounts theory_counts(double rkhs_norm, double radius, double epsilon, double delta);

}  // namespace rrf
