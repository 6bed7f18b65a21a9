#include "ac/env/gridworld.hpp"

#include <algorithm>
#include <stdexcept>

#include "ac/core/rng.hpp"

namespace ac::env {
namespace {

constexpr int kStay = 0;
// up, down, left, right as (drow, dcol)
constexpr int kDRow[5] = {0, -1, 1, 0, 0};
constexpr int kDCol[5] = {0, 0, 0, -1, 1};

}  // namespace

AsyncGridworld::AsyncGridworld(GridworldConfig cfg) : cfg_(cfg) {
    cells_ = cfg_.grid_size * cfg_.grid_size;
    goal_ = (cfg_.grid_size / 2) * cfg_.grid_size + cfg_.grid_size / 2;  // center
    spec_.n_agents = kAgents;
    spec_.action_count = 5;
    // own cell one-hot, 3x3 neighborhood item and goal bits, phase, item flags
    spec_.obs_dim = static_cast<std::size_t>(cells_) + 9 + 9 + 1 + kItems;
    spec_.state_dim = static_cast<std::size_t>(cells_) * kAgents + kItems + kAgents;
    spec_.episode_limit = cfg_.episode_limit;
}

int AsyncGridworld::duration(int agent, int action) const {
    return action == kStay ? 1 : cfg_.move_duration[static_cast<std::size_t>(agent)];
}

StepResult AsyncGridworld::reset(std::uint64_t seed) {
    Rng rng(seed);
    // distinct item cells off the goal, then distinct agent start cells
    std::vector<int> free;
    for (int c = 0; c < cells_; ++c)
        if (c != goal_) free.push_back(c);
    for (int i = 0; i < kItems; ++i) {
        const std::size_t pick = rng.below(free.size());
        item_cell_[i] = free[pick];
        free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
        item_alive_[i] = 1;
    }
    std::vector<int> cells;
    for (int c = 0; c < cells_; ++c) cells.push_back(c);
    for (int i = 0; i < kAgents; ++i) {
        const std::size_t pick = rng.below(cells.size());
        pos_[i] = cells[pick];
        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(pick));
        lock_[i] = 0;
    }
    terminated_ = false;
    return view();
}

bool AsyncGridworld::occupied(int cell, int except_agent) const {
    for (int i = 0; i < kAgents; ++i)
        if (i != except_agent && pos_[i] == cell) return true;
    return false;
}

StepResult AsyncGridworld::step(const std::vector<int>& joint_action) {
    if (joint_action.size() != kAgents)
        throw std::invalid_argument("gridworld: need 3 actions");
    for (int a : joint_action)
        if (a < 0 || a >= 5) throw std::out_of_range("gridworld: action id out of range");
    if (terminated_) throw std::logic_error("gridworld: episode already terminated");

    const int g = cfg_.grid_size;
    // deciding agents commit in index order; executing agents just count down
    for (int i = 0; i < kAgents; ++i) {
        if (lock_[i] > 0) {
            --lock_[i];
            continue;
        }
        const int a = joint_action[static_cast<std::size_t>(i)];
        if (a != kStay) {
            const int row = pos_[i] / g + kDRow[a];
            const int col = pos_[i] % g + kDCol[a];
            if (row >= 0 && row < g && col >= 0 && col < g) {
                const int target = row * g + col;
                if (!occupied(target, i)) pos_[i] = target;
            }
            lock_[i] = duration(i, a) - 1;
        }
    }

    double reward = -0.1;
    // an item ships when someone stands on it while someone else mans the goal
    // (item cells never coincide with the goal, so the two are distinct agents)
    const bool receiver = occupied(goal_, -1);
    if (receiver) {
        for (int it = 0; it < kItems; ++it) {
            if (!item_alive_[it]) continue;
            if (occupied(item_cell_[it], -1)) {
                item_alive_[it] = 0;
                reward += 10.0;
            }
        }
    }
    terminated_ = !item_alive_[0] && !item_alive_[1];

    StepResult r = view();
    r.reward = reward;
    return r;
}

std::vector<double> AsyncGridworld::agent_obs(int agent) const {
    const int g = cfg_.grid_size;
    std::vector<double> o;
    o.reserve(spec_.obs_dim);
    for (int c = 0; c < cells_; ++c) o.push_back(c == pos_[agent] ? 1.0 : 0.0);
    const int arow = pos_[agent] / g, acol = pos_[agent] % g;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const int row = arow + dr, col = acol + dc;
            double item_here = 0.0;
            if (row >= 0 && row < g && col >= 0 && col < g) {
                const int cell = row * g + col;
                for (int it = 0; it < kItems; ++it)
                    if (item_alive_[it] && item_cell_[it] == cell) item_here = 1.0;
            }
            o.push_back(item_here);
        }
    }
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const int row = arow + dr, col = acol + dc;
            const bool in = row >= 0 && row < g && col >= 0 && col < g;
            o.push_back(in && row * g + col == goal_ ? 1.0 : 0.0);
        }
    }
    o.push_back(static_cast<double>(lock_[agent]) / 3.0);
    for (int it = 0; it < kItems; ++it) o.push_back(item_alive_[it] ? 1.0 : 0.0);
    return o;
}

StepResult AsyncGridworld::view() const {
    StepResult r;
    r.state.reserve(spec_.state_dim);
    for (int i = 0; i < kAgents; ++i)
        for (int c = 0; c < cells_; ++c) r.state.push_back(c == pos_[i] ? 1.0 : 0.0);
    for (int it = 0; it < kItems; ++it) r.state.push_back(item_alive_[it] ? 1.0 : 0.0);
    for (int i = 0; i < kAgents; ++i) r.state.push_back(static_cast<double>(lock_[i]) / 3.0);

    r.obs.resize(kAgents);
    for (int i = 0; i < kAgents; ++i) r.obs[i] = agent_obs(i);
    r.terminated = terminated_;
    r.decision_mask.resize(kAgents);
    r.available.assign(kAgents, std::vector<std::uint8_t>(5, 0));
    for (int i = 0; i < kAgents; ++i) {
        const bool deciding = lock_[i] == 0 && !terminated_;
        r.decision_mask[i] = deciding ? 1 : 0;
        if (deciding) r.available[i].assign(5, 1);
    }
    return r;
}

std::vector<std::int64_t> AsyncGridworld::save_state() const {
    std::vector<std::int64_t> key;
    for (int i = 0; i < kAgents; ++i) key.push_back(pos_[i]);
    for (int i = 0; i < kAgents; ++i) key.push_back(lock_[i]);
    for (int it = 0; it < kItems; ++it) key.push_back(item_alive_[it]);
    for (int it = 0; it < kItems; ++it) key.push_back(item_cell_[it]);
    key.push_back(terminated_ ? 1 : 0);
    return key;
}

void AsyncGridworld::load_state(const std::vector<std::int64_t>& key) {
    if (key.size() != 3 + 3 + 2 + 2 + 1) throw std::invalid_argument("gridworld: bad state key");
    for (int i = 0; i < kAgents; ++i) pos_[i] = static_cast<int>(key[static_cast<std::size_t>(i)]);
    for (int i = 0; i < kAgents; ++i) lock_[i] = static_cast<int>(key[static_cast<std::size_t>(3 + i)]);
    for (int it = 0; it < kItems; ++it)
        item_alive_[it] = static_cast<int>(key[static_cast<std::size_t>(6 + it)]);
    for (int it = 0; it < kItems; ++it)
        item_cell_[it] = static_cast<int>(key[static_cast<std::size_t>(8 + it)]);
    terminated_ = key[10] != 0;
}

std::unique_ptr<Env> AsyncGridworld::clone() const {
    return std::make_unique<AsyncGridworld>(*this);
}

}  // namespace ac::env
