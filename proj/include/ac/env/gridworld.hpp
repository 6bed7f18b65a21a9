#pragma once

#include <array>

#include "ac/env/env.hpp"

namespace ac::env {

struct GridworldConfig {
    int grid_size = 3;           // 3 for the enumerable variant, 5 for training-only runs
    std::array<int, 3> move_duration = {1, 2, 3};  // per agent, steps per move
    std::size_t episode_limit = 50;
};

/// Three agents on a small grid deliver two items jointly: an item ships when
/// one agent stands on its cell while another stands on the goal cell. Moves
/// apply immediately but lock the agent for duration-1 further steps, during
/// which it cannot re-decide. Shared reward: +10 per delivered item, -0.1 per
/// step; terminal once both items are delivered.
///
/// Actions: 0 stay, 1 up, 2 down, 3 left, 4 right. Moves off-grid or into an
/// occupied cell fail (the agent stays) but still lock for the full duration.
class AsyncGridworld final : public Env {
public:
    static constexpr int kAgents = 3;
    static constexpr int kItems = 2;

    explicit AsyncGridworld(GridworldConfig cfg = {});

    const EnvSpec& spec() const override { return spec_; }
    int duration(int agent, int action) const override;
    StepResult reset(std::uint64_t seed) override;
    StepResult step(const std::vector<int>& joint_action) override;
    StepResult view() const override;
    std::vector<std::int64_t> save_state() const override;
    void load_state(const std::vector<std::int64_t>& key) override;
    std::unique_ptr<Env> clone() const override;

    const GridworldConfig& config() const { return cfg_; }
    int goal_cell() const { return goal_; }
    int item_cell(int i) const { return item_cell_[i]; }
    int agent_cell(int i) const { return pos_[i]; }
    int lock_remaining(int i) const { return lock_[i]; }

private:
    std::vector<double> agent_obs(int agent) const;
    bool occupied(int cell, int except_agent) const;

    GridworldConfig cfg_;
    EnvSpec spec_;
    int cells_ = 9;
    int goal_ = 4;
    std::array<int, kAgents> pos_ = {0, 0, 0};
    std::array<int, kAgents> lock_ = {0, 0, 0};
    std::array<int, kItems> item_cell_ = {0, 0};
    std::array<int, kItems> item_alive_ = {1, 1};
    bool terminated_ = false;
};

}  // namespace ac::env
