#pragma once

#include "ac/env/env.hpp"

namespace ac::env {

/// Two-player sequential game. The row agent commits a two-step value action
/// at t=0 while the column agent can only hold; at t=1 the column agent sees
/// which row action is running and picks its own value action; the episode
/// ends with reward equal to the product of the two chosen action values.
///
/// Actions: 0 -> value 1, 1 -> value 2, 2 -> hold.
class AsyncMatrixGame final : public Env {
public:
    static constexpr int kValueA = 0;
    static constexpr int kValueB = 1;
    static constexpr int kHold = 2;
    static constexpr int kRow = 0;
    static constexpr int kCol = 1;

    AsyncMatrixGame();

    const EnvSpec& spec() const override { return spec_; }
    int duration(int agent, int action) const override;
    StepResult reset(std::uint64_t seed) override;
    StepResult step(const std::vector<int>& joint_action) override;
    StepResult view() const override;
    std::vector<std::int64_t> save_state() const override;
    void load_state(const std::vector<std::int64_t>& key) override;
    std::unique_ptr<Env> clone() const override;

    double action_value(int action) const { return values_[action]; }

private:
    EnvSpec spec_;
    double values_[2] = {1.0, 2.0};
    int phase_ = 0;       // 0: both at start, 1: column's turn, 2: done
    int row_choice_ = -1; // committed row action, -1 before t=0
};

}  // namespace ac::env
