#include "ac/vsp/discard.hpp"

namespace ac::vsp {

std::vector<std::vector<MacroTransition>> collect_discarding(env::Env& env,
                                                             const AgentPolicy& policy,
                                                             double gamma,
                                                             std::uint64_t seed) {
    const std::size_t n = env.spec().n_agents;
    std::vector<std::vector<MacroTransition>> streams(n);

    struct Open {
        bool active = false;
        std::vector<double> obs;
        int action = 0;
        double reward = 0.0;
        double discount = 1.0;
        int span = 0;
    };
    std::vector<Open> open(n);

    env::StepResult res = env.reset(seed);
    std::size_t t = 0;
    while (!res.terminated && t < env.spec().episode_limit) {
        std::vector<int> joint(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!res.decision_mask[i]) continue;
            const int a = policy(static_cast<int>(i), res.obs[i], res.available[i]);
            joint[i] = a;
            open[i].active = true;
            open[i].obs = res.obs[i];
            open[i].action = a;
            open[i].reward = 0.0;
            open[i].discount = 1.0;
            open[i].span = 0;
        }
        res = env.step(joint);
        ++t;
        for (std::size_t i = 0; i < n; ++i) {
            if (!open[i].active) continue;
            open[i].reward += open[i].discount * res.reward;
            open[i].discount *= gamma;
            open[i].span += 1;
            const bool done_for_agent = res.decision_mask[i] || res.terminated;
            if (done_for_agent) {
                MacroTransition mt;
                mt.obs = std::move(open[i].obs);
                mt.action = open[i].action;
                mt.reward = open[i].reward;
                mt.next_obs = res.obs[i];
                mt.next_avail = res.available[i];
                mt.span = open[i].span;
                mt.terminal = res.terminated;
                streams[i].push_back(std::move(mt));
                open[i].active = false;
            }
        }
    }
    // episode truncated mid-action: close what is still running
    for (std::size_t i = 0; i < n; ++i) {
        if (!open[i].active) continue;
        MacroTransition mt;
        mt.obs = std::move(open[i].obs);
        mt.action = open[i].action;
        mt.reward = open[i].reward;
        mt.next_obs = res.obs[i];
        mt.next_avail = res.available[i];
        mt.span = open[i].span;
        mt.terminal = res.terminated;
        streams[i].push_back(std::move(mt));
    }
    return streams;
}

}  // namespace ac::vsp
