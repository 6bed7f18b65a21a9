#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ac/core/tensor.hpp"

namespace ac::grad {

/// One value in the computation graph. Parameters are long-lived nodes with
/// requires_grad set; intermediates are created by ops and dropped when the
/// tape is reset.
struct Node {
    Tensor value;
    Tensor grad;  // empty until first accumulation
    bool requires_grad = false;

    Node() = default;
    explicit Node(Tensor v, bool rg = false) : value(std::move(v)), requires_grad(rg) {}
};

using Var = std::shared_ptr<Node>;

inline Var make_var(Tensor value, bool requires_grad = false) {
    return std::make_shared<Node>(std::move(value), requires_grad);
}

inline Var make_param(Tensor value) { return make_var(std::move(value), true); }

inline Tensor& ensure_grad(const Var& v) {
    if (v->grad.numel() == 0) v->grad = Tensor::zeros(v->value.shape());
    return v->grad;
}

inline void zero_grad(const Var& v) {
    if (v->grad.numel() != 0) v->grad.fill(0.0);
}

/// Reverse-mode tape: ops push backward closures during the forward pass and
/// backward() replays them last-to-first. One tape per training step; reset
/// drops the graph.
class Tape {
public:
    void record(std::function<void()> fn) { records_.push_back(std::move(fn)); }

    /// Seeds d(loss)/d(loss) = 1 and propagates. Loss must be scalar.
    void backward(const Var& loss) {
        if (loss->value.numel() != 1)
            throw std::logic_error("Tape::backward: loss must be scalar, got shape " +
                                   loss->value.shape_str());
        ensure_grad(loss)[0] += 1.0;
        for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
    }

    void reset() { records_.clear(); }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<std::function<void()>> records_;
};

}  // namespace ac::grad
