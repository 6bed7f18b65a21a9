#pragma once

#include <functional>

#include "ac/env/env.hpp"

namespace ac::vsp {

/// One macro transition in an agent's discarded stream: the decision context,
/// the chosen action, the discounted reward accumulated over the action's
/// duration, and the next decision context.
struct MacroTransition {
    std::vector<double> obs;
    int action = 0;
    double reward = 0.0;  // sum_k gamma^k r over the action's span
    std::vector<double> next_obs;
    std::vector<std::uint8_t> next_avail;  // allowed actions at the next decision
    int span = 0;
    bool terminal = false;  // episode ended during the span
};

/// agent id, current observation, allowed actions -> action id
using AgentPolicy = std::function<int(int, const std::vector<double>&,
                                      const std::vector<std::uint8_t>&)>;

/// Rolls one episode and splits it into per-agent macro-transition streams,
/// ignoring everything between an agent's own decision points (the discarding
/// baseline). Returns one stream per agent.
std::vector<std::vector<MacroTransition>> collect_discarding(env::Env& env,
                                                             const AgentPolicy& policy,
                                                             double gamma,
                                                             std::uint64_t seed);

}  // namespace ac::vsp
