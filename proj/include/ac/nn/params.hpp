#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ac/core/rng.hpp"
#include "ac/grad/tape.hpp"

namespace ac::nn {

/// Ordered, named collection of trainable tensors. Modules register their
/// parameters here; the optimizer, target-sync and checkpoints all work off
/// the flat list, so registration order is part of the reproducibility
/// contract.
class ParamSet {
public:
    grad::Var add(std::string name, Tensor init, bool requires_grad = true) {
        auto v = grad::make_var(std::move(init), requires_grad);
        items_.emplace_back(std::move(name), v);
        return v;
    }

    const std::vector<std::pair<std::string, grad::Var>>& items() const { return items_; }

    grad::Var find(const std::string& name) const {
        for (const auto& [n, v] : items_)
            if (n == name) return v;
        return nullptr;
    }

    void zero_grads() {
        for (auto& [n, v] : items_) grad::zero_grad(v);
    }

    void set_requires_grad(bool rg) {
        for (auto& [n, v] : items_) v->requires_grad = rg;
    }

    /// Copies values (not grads) from a set with identical layout.
    void copy_values_from(const ParamSet& src) {
        if (src.items_.size() != items_.size())
            throw std::logic_error("ParamSet::copy_values_from: layout mismatch");
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (src.items_[i].first != items_[i].first ||
                !src.items_[i].second->value.same_shape(items_[i].second->value))
                throw std::logic_error("ParamSet::copy_values_from: layout mismatch at " +
                                       items_[i].first);
            items_[i].second->value = src.items_[i].second->value;
        }
    }

    bool values_equal(const ParamSet& other) const {
        if (other.items_.size() != items_.size()) return false;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            const auto& a = items_[i].second->value.vec();
            const auto& b = other.items_[i].second->value.vec();
            if (a != b) return false;
        }
        return true;
    }

    std::size_t total_numel() const {
        std::size_t n = 0;
        for (const auto& [k, v] : items_) n += v->value.numel();
        return n;
    }

private:
    std::vector<std::pair<std::string, grad::Var>> items_;
};

/// Uniform +-1/sqrt(fan_in) init, the convention used for every layer here.
inline Tensor uniform_init(Rng& rng, std::vector<std::size_t> shape, std::size_t fan_in) {
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

}  // namespace ac::nn
