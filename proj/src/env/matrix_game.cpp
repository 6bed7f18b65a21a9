#include "ac/env/matrix_game.hpp"

#include <stdexcept>

namespace ac::env {

AsyncMatrixGame::AsyncMatrixGame() {
    spec_.n_agents = 2;
    spec_.action_count = 3;
    spec_.obs_dim = 6;
    spec_.state_dim = 5;
    spec_.episode_limit = 3;
}

int AsyncMatrixGame::duration(int agent, int action) const {
    if (agent == kRow && action != kHold) return 2;
    return 1;
}

StepResult AsyncMatrixGame::reset(std::uint64_t /*seed*/) {
    phase_ = 0;
    row_choice_ = -1;
    return view();
}

StepResult AsyncMatrixGame::view() const {
    StepResult r;
    r.state = {phase_ == 0 ? 1.0 : 0.0, phase_ == 1 ? 1.0 : 0.0,
               row_choice_ < 0 ? 1.0 : 0.0, row_choice_ == kValueA ? 1.0 : 0.0,
               row_choice_ == kValueB ? 1.0 : 0.0};
    r.obs.resize(2);
    for (int agent = 0; agent < 2; ++agent) {
        // [start token, row-running none/a/b, self-is-row, self-executing]
        r.obs[agent] = {phase_ == 0 ? 1.0 : 0.0,
                        row_choice_ < 0 ? 1.0 : 0.0,
                        row_choice_ == kValueA ? 1.0 : 0.0,
                        row_choice_ == kValueB ? 1.0 : 0.0,
                        agent == kRow ? 1.0 : 0.0,
                        (agent == kRow && phase_ == 1) ? 1.0 : 0.0};
    }
    r.terminated = phase_ == 2;
    r.decision_mask = {static_cast<std::uint8_t>(phase_ == 0),
                       static_cast<std::uint8_t>(phase_ != 2)};
    r.available.assign(2, std::vector<std::uint8_t>(3, 0));
    if (phase_ == 0) {
        r.available[kRow] = {1, 1, 0};
        r.available[kCol] = {0, 0, 1};  // the column agent can only hold at t=0
    } else if (phase_ == 1) {
        r.available[kCol] = {1, 1, 0};
    }
    return r;
}

StepResult AsyncMatrixGame::step(const std::vector<int>& joint_action) {
    if (joint_action.size() != 2) throw std::invalid_argument("matrix game: need 2 actions");
    for (int a : joint_action)
        if (a < 0 || a >= 3) throw std::out_of_range("matrix game: action id out of range");
    if (phase_ == 2) throw std::logic_error("matrix game: episode already terminated");

    double reward = 0.0;
    if (phase_ == 0) {
        int a = joint_action[kRow];
        if (a == kHold) a = kValueA;  // hold is unavailable to the row agent
        row_choice_ = a;
        phase_ = 1;
    } else {
        int a = joint_action[kCol];
        if (a == kHold) a = kValueA;
        reward = values_[row_choice_] * values_[a];
        phase_ = 2;
        row_choice_ = -1;
    }
    StepResult r = view();
    r.reward = reward;
    return r;
}

std::vector<std::int64_t> AsyncMatrixGame::save_state() const {
    return {phase_, row_choice_};
}

void AsyncMatrixGame::load_state(const std::vector<std::int64_t>& key) {
    phase_ = static_cast<int>(key.at(0));
    row_choice_ = static_cast<int>(key.at(1));
}

std::unique_ptr<Env> AsyncMatrixGame::clone() const {
    return std::make_unique<AsyncMatrixGame>(*this);
}

}  // namespace ac::env
