#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ac/grad/tape.hpp"

// Central finite-difference gradient oracle. Independent of the tape: it only
// perturbs raw parameter storage and re-runs the provided forward function.

namespace actest {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

inline double rel_err(double analytic, double numeric) {
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1.0});
    return std::fabs(analytic - numeric) / denom;
}

// `forward` must rebuild the graph from scratch on the given tape and return
// the scalar loss. `leaves` are the tensors to check.
inline GradCheckResult grad_check(const std::function<ac::grad::Var(ac::grad::Tape*)>& forward,
                                  const std::vector<ac::grad::Var>& leaves,
                                  double eps = 1e-5) {
    using namespace ac::grad;
    for (const auto& v : leaves) zero_grad(v);
    Tape tape;
    Var loss = forward(&tape);
    tape.backward(loss);

    GradCheckResult res;
    for (const auto& leaf : leaves) {
        ensure_grad(leaf);
        for (std::size_t i = 0; i < leaf->value.numel(); ++i) {
            const double saved = leaf->value[i];
            leaf->value[i] = saved + eps;
            const double up = forward(nullptr)->value.item();
            leaf->value[i] = saved - eps;
            const double dn = forward(nullptr)->value.item();
            leaf->value[i] = saved;
            const double numeric = (up - dn) / (2.0 * eps);
            res.max_rel_err = std::max(res.max_rel_err, rel_err(leaf->grad[i], numeric));
            ++res.checked;
        }
    }
    return res;
}

}  // namespace actest
