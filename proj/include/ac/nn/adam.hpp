#pragma once

#include "ac/nn/params.hpp"

namespace ac::nn {

struct AdamConfig {
    double lr = 0.0005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction over one ParamSet. Aborts with a diagnostic if a
/// gradient turns non-finite.
class Adam {
public:
    Adam(ParamSet& params, AdamConfig cfg = {});

    /// Applies one update from the accumulated grads, then zeroes them.
    void step();

    std::uint64_t step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    ParamSet& params_;
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    std::uint64_t t_ = 0;
};

}  // namespace ac::nn
