#include "ac/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ac::nn {

Adam::Adam(ParamSet& params, AdamConfig cfg) : params_(params), cfg_(cfg) {
    for (const auto& [name, var] : params_.items()) {
        m_.emplace_back(var->value.numel(), 0.0);
        v_.emplace_back(var->value.numel(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const auto& items = params_.items();
    for (std::size_t p = 0; p < items.size(); ++p) {
        const auto& [name, var] = items[p];
        if (var->grad.numel() == 0) {
            // never touched this step: moments still decay
            for (double& x : m_[p]) x *= cfg_.beta1;
            for (double& x : v_[p]) x *= cfg_.beta2;
            continue;
        }
        auto& m = m_[p];
        auto& v = v_[p];
        double* w = var->value.data();
        double* g = var->grad.data();
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!std::isfinite(g[i]))
                throw std::runtime_error("Adam: non-finite gradient in '" + name + "'");
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            g[i] = 0.0;
        }
    }
}

}  // namespace ac::nn
