#include "ac/learn/rollout.hpp"

#include <cmath>

namespace ac::learn {
namespace {

struct SlotChoice {
    int action = 0;
    double q = 0.0;
};

/// Greedy-under-mask with optional exploration. Ties go to the lowest id.
SlotChoice choose(const double* q, const std::uint8_t* avail, std::size_t width,
                  double epsilon, Rng* rng, int blank) {
    std::vector<int> allowed;
    for (std::size_t a = 0; a < width; ++a)
        if (avail[a]) allowed.push_back(static_cast<int>(a));
    if (allowed.empty()) return {blank, 0.0};
    if (allowed.size() == 1) return {allowed[0], q[allowed[0]]};

    int best = allowed[0];
    for (int a : allowed)
        if (q[a] > q[best]) best = a;
    if (epsilon > 0.0 && rng) {
        if (rng->uniform() < epsilon) {
            const int pick = allowed[rng->below(allowed.size())];
            return {pick, q[pick]};
        }
    }
    return {best, q[best]};
}

struct RolloutResult {
    Episode episode;
    double ret = 0.0;
    bool terminated = false;
};

RolloutResult roll(SlotEnv& env, const Model& model, double epsilon, Rng* rng,
                   std::uint64_t env_seed, bool record) {
    using grad::Var;
    const std::size_t S = env.n_slots();
    const std::size_t A = env.action_width();
    const int blank = static_cast<int>(A) - 1;

    RolloutResult out;
    Episode& ep = out.episode;
    ep.n_slots = S;
    ep.n_agents = env.n_agents();
    ep.obs_dim = env.obs_dim();
    ep.action_width = A;
    ep.state_dim = env.mix_state_dim();

    SlotView view = env.reset(env_seed);
    Var h = grad::make_var(Tensor({S, model.cfg.hidden_dim}));
    std::vector<int> prev(S, -1);

    auto push_view = [&](const SlotView& v) {
        if (!record) return;
        for (std::size_t s = 0; s < S; ++s)
            ep.slot_obs.insert(ep.slot_obs.end(), v.slot_obs[s].begin(), v.slot_obs[s].end());
        ep.mix_state.insert(ep.mix_state.end(), v.mix_state.begin(), v.mix_state.end());
        for (std::size_t s = 0; s < S; ++s)
            ep.avail.insert(ep.avail.end(), v.avail[s].begin(), v.avail[s].end());
        ep.util_mask.insert(ep.util_mask.end(), v.util_mask.begin(), v.util_mask.end());
        ep.deciding_mask.insert(ep.deciding_mask.end(), v.deciding_mask.begin(),
                                v.deciding_mask.end());
        ep.proxy_mask.insert(ep.proxy_mask.end(), v.proxy_mask.begin(), v.proxy_mask.end());
    };

    push_view(view);
    const std::size_t limit = env.episode_limit();
    for (std::size_t t = 0; t < limit && !view.terminated; ++t) {
        Tensor input({S, model.input_dim()});
        for (std::size_t s = 0; s < S; ++s)
            model.fill_input_row(input.data() + s * model.input_dim(), view.slot_obs[s].data(),
                                 prev[s], s);
        auto [q, h2] = model.net.forward(nullptr, grad::make_var(std::move(input)), h);
        h = h2;

        std::vector<int> actions(S);
        for (std::size_t s = 0; s < S; ++s) {
            const SlotChoice pick = choose(q->value.data() + s * A, view.avail[s].data(), A,
                                           epsilon, rng, blank);
            actions[s] = pick.action;
            if (record) {
                ep.actions.push_back(pick.action);
                ep.chosen_q.push_back(pick.q);
            }
        }
        view = env.step(actions);
        prev = actions;
        out.ret += view.reward;
        if (record) {
            ep.rewards.push_back(view.reward);
            ep.terminated.push_back(view.terminated ? 1 : 0);
            ++ep.steps;
        }
        push_view(view);
    }
    out.terminated = view.terminated;
    if (record) {
        ep.undiscounted_return = out.ret;
        ep.truncated = !view.terminated;
    }
    return out;
}

}  // namespace

Episode collect_episode(SlotEnv& env, const Model& model, double epsilon, Rng& rng,
                        std::uint64_t env_seed) {
    return roll(env, model, epsilon, &rng, env_seed, true).episode;
}

EvalStats evaluate(SlotEnv& env, const Model& model, std::size_t episodes,
                   std::uint64_t env_seed) {
    EvalStats stats;
    double sum = 0.0, sumsq = 0.0, lengths = 0.0;
    std::size_t wins = 0;
    for (std::size_t i = 0; i < episodes; ++i) {
        RolloutResult r = roll(env, model, 0.0, nullptr, env_seed, true);
        sum += r.ret;
        sumsq += r.ret * r.ret;
        lengths += static_cast<double>(r.episode.steps);
        if (r.terminated) ++wins;
    }
    const double n = static_cast<double>(episodes);
    stats.mean_return = sum / n;
    stats.std_return = std::sqrt(std::max(0.0, sumsq / n - stats.mean_return * stats.mean_return));
    stats.success_rate = static_cast<double>(wins) / n;
    stats.mean_length = lengths / n;
    return stats;
}

}  // namespace ac::learn
