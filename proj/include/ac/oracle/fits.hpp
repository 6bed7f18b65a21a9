#pragma once

#include <vector>

namespace ac::oracle {

struct FitResult {
    std::vector<double> params;  // [k0, k1, k2] or [k0, k1, k2, k12]
    double residual = 0.0;       // sum of squared errors at the optimum
};

/// Exact least squares of k0 + k1*v_a + k2*v_b against a two-player payoff
/// table, with identity utilities Q_i(a_i) = value of a_i. payoff[i][j] pairs
/// values_a[i] with values_b[j].
FitResult additive_fit(const std::vector<double>& values_a, const std::vector<double>& values_b,
                       const std::vector<std::vector<double>>& payoff);

/// Same with the multiplicative term k12*v_a*v_b added.
FitResult mvd_fit(const std::vector<double>& values_a, const std::vector<double>& values_b,
                  const std::vector<std::vector<double>>& payoff);

}  // namespace ac::oracle
