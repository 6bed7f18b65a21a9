#pragma once

#include <cstdint>
#include <vector>

namespace ac::learn {

/// One stored trajectory. Step-indexed rows are flattened; observation, mix
/// state, allowed-action and mask rows exist for steps 0..T (the trailing row
/// feeds bootstrap targets), actions and rewards for steps 0..T-1.
struct Episode {
    std::size_t steps = 0;  // T
    std::size_t n_slots = 0, n_agents = 0, obs_dim = 0, action_width = 0, state_dim = 0;

    std::vector<double> slot_obs;          // (T+1) * n_slots * obs_dim
    std::vector<double> mix_state;         // (T+1) * state_dim
    std::vector<std::uint8_t> avail;       // (T+1) * n_slots * action_width
    std::vector<double> util_mask;         // (T+1) * n_slots
    std::vector<double> deciding_mask;     // (T+1) * n_agents
    std::vector<double> proxy_mask;        // (T+1) * n_agents
    std::vector<int> actions;              // T * n_slots
    std::vector<double> rewards;           // T
    std::vector<std::uint8_t> terminated;  // T
    std::vector<double> chosen_q;          // T * n_slots (collection-time utilities)

    double undiscounted_return = 0.0;
    bool truncated = false;

    const double* obs_at(std::size_t t, std::size_t slot) const {
        return slot_obs.data() + (t * n_slots + slot) * obs_dim;
    }
    const std::uint8_t* avail_at(std::size_t t, std::size_t slot) const {
        return avail.data() + (t * n_slots + slot) * action_width;
    }
    int action_at(std::size_t t, std::size_t slot) const {
        return actions[t * n_slots + slot];
    }
};

}  // namespace ac::learn
