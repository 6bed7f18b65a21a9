#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace ac::env {

struct EnvSpec {
    std::size_t n_agents = 0;
    std::size_t action_count = 0;  // env actions; the blank sentinel is action_count
    std::size_t obs_dim = 0;
    std::size_t state_dim = 0;
    std::size_t episode_limit = 0;
};

/// Per-step view of the environment. `terminated` means task completion only;
/// hitting the episode limit is rollout truncation handled by collectors.
struct StepResult {
    std::vector<double> state;
    std::vector<std::vector<double>> obs;       // per agent
    double reward = 0.0;
    bool terminated = false;
    std::vector<std::uint8_t> decision_mask;    // 1 iff the agent must choose now
    std::vector<std::vector<std::uint8_t>> available;  // per agent, per action id
};

/// A cooperative environment with per-action durations. Agents whose running
/// action has not completed have decision_mask false and their supplied
/// action is ignored by step(). Deterministic state machines: save_state and
/// load_state expose the full Markov state for enumeration.
class Env {
public:
    virtual ~Env() = default;

    virtual const EnvSpec& spec() const = 0;

    /// Steps the chosen action spans, >= 1.
    virtual int duration(int agent, int action) const = 0;

    virtual StepResult reset(std::uint64_t seed) = 0;

    /// Out-of-range action ids throw; in-range but unavailable actions are
    /// coerced to the lowest available id.
    virtual StepResult step(const std::vector<int>& joint_action) = 0;

    virtual StepResult view() const = 0;  // current state without advancing

    virtual std::vector<std::int64_t> save_state() const = 0;
    virtual void load_state(const std::vector<std::int64_t>& key) = 0;
    virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace ac::env
