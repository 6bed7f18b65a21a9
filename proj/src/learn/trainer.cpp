#include "ac/learn/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace ac::learn {
namespace {

using grad::Tape;
using grad::Var;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double train_step(const std::vector<const Episode*>& batch, Model& online, Model& target,
                  mix::QminTracker& tracker, nn::Adam& opt, double gamma) {
    const std::size_t B = batch.size();
    const std::size_t S = online.n_slots;
    const std::size_t A = online.action_width;
    const std::size_t n = online.n_agents;
    const std::size_t D = online.mix_state_dim;
    std::size_t T = 0;
    for (const Episode* ep : batch) T = std::max(T, ep->steps);
    if (T == 0) return 0.0;

    Tape tape;
    const std::size_t rows = B * S;

    // per time step: shared input tensor, online (taped) and target forwards
    Var h_online = grad::make_var(Tensor({rows, online.cfg.hidden_dim}));
    Var h_target = grad::make_var(Tensor({rows, target.cfg.hidden_dim}));
    std::vector<Var> chosen_per_step;        // [B,S] online utilities at taken actions
    std::vector<Tensor> target_greedy(T + 1);  // [B,S] target utilities, frozen-greedy

    for (std::size_t t = 0; t <= T; ++t) {
        Tensor input({rows, online.input_dim()});
        for (std::size_t b = 0; b < B; ++b) {
            const Episode& ep = *batch[b];
            for (std::size_t s = 0; s < S; ++s) {
                double* dst = input.data() + (b * S + s) * online.input_dim();
                if (t <= ep.steps) {
                    const int prev = t > 0 ? ep.action_at(t - 1, s) : -1;
                    online.fill_input_row(dst, ep.obs_at(t, s), prev, s);
                } else {
                    for (std::size_t d = 0; d < online.input_dim(); ++d) dst[d] = 0.0;
                }
            }
        }
        Var x = grad::make_var(std::move(input));

        if (t < T) {
            auto [q, h2] = online.net.forward(&tape, x, h_online);
            h_online = h2;
            std::vector<int> idx(rows, 0);
            for (std::size_t b = 0; b < B; ++b) {
                const Episode& ep = *batch[b];
                for (std::size_t s = 0; s < S; ++s)
                    if (t < ep.steps) idx[b * S + s] = ep.action_at(t, s);
            }
            chosen_per_step.push_back(
                grad::reshape(&tape, grad::gather_cols(&tape, q, idx), {B, S}));
        }

        auto [tq, th2] = target.net.forward(nullptr, x, h_target);
        h_target = th2;
        Tensor greedy({B, S});
        for (std::size_t b = 0; b < B; ++b) {
            const Episode& ep = *batch[b];
            for (std::size_t s = 0; s < S; ++s) {
                double best = 0.0;
                if (t <= ep.steps) {
                    const std::uint8_t* avail = ep.avail_at(t, s);
                    bool any = false;
                    for (std::size_t a = 0; a < A; ++a) {
                        if (!avail[a]) continue;
                        const double v = tq->value.at(b * S + s, a);
                        if (!any || v > best) best = v;
                        any = true;
                    }
                }
                greedy.at(b, s) = best;
            }
        }
        target_greedy[t] = std::move(greedy);
    }

    // proxy minimum tracking from this batch, before any mixer forward
    if (S == 2 * n) {
        for (std::size_t t = 0; t < T; ++t) {
            const Tensor& u = chosen_per_step[t]->value;
            for (std::size_t b = 0; b < B; ++b) {
                const Episode& ep = *batch[b];
                if (t >= ep.steps) continue;
                for (std::size_t j = 0; j < n; ++j)
                    if (ep.proxy_mask[t * n + j] != 0.0) tracker.update(u.at(b, n + j));
            }
        }
    }
    const double offset = tracker.offset();

    auto masks_at = [&](std::size_t t) {
        mix::MixerBatch mb;
        Tensor state({B, D}), um({B, S}), dm({B, n}), pm({B, n});
        for (std::size_t b = 0; b < B; ++b) {
            const Episode& ep = *batch[b];
            if (t <= ep.steps) {
                std::copy(ep.mix_state.begin() + static_cast<std::ptrdiff_t>(t * D),
                          ep.mix_state.begin() + static_cast<std::ptrdiff_t>((t + 1) * D),
                          state.data() + b * D);
                for (std::size_t s = 0; s < S; ++s) um.at(b, s) = ep.util_mask[t * S + s];
                for (std::size_t j = 0; j < n; ++j) {
                    dm.at(b, j) = ep.deciding_mask[t * n + j];
                    pm.at(b, j) = ep.proxy_mask[t * n + j];
                }
            }
        }
        mb.state = grad::constant(std::move(state));
        mb.util_mask = std::move(um);
        mb.deciding_mask = std::move(dm);
        mb.proxy_mask = std::move(pm);
        mb.n_agents = n;
        mb.n_slots = S;
        mb.qmin_offset = offset;
        return mb;
    };

    // per-step mixing: online Qtot on taken actions, target Qtot on greedy
    std::vector<Var> qtot_steps;
    Tensor targets({B, T});
    Tensor fill({B, T});
    for (std::size_t t = 0; t < T; ++t) {
        mix::MixerBatch mb = masks_at(t);
        mb.utilities = chosen_per_step[t];
        qtot_steps.push_back(online.mixer->forward(&tape, mb));

        mix::MixerBatch tb = masks_at(t + 1);
        tb.utilities = grad::constant(target_greedy[t + 1]);
        Var next_q = target.mixer->forward(nullptr, tb);
        for (std::size_t b = 0; b < B; ++b) {
            const Episode& ep = *batch[b];
            if (t >= ep.steps) continue;
            fill.at(b, t) = 1.0;
            const double bootstrap =
                ep.terminated[t] ? 0.0 : gamma * next_q->value.at(b, 0);
            targets.at(b, t) = ep.rewards[t] + bootstrap;
        }
    }

    Var qtot = grad::concat_cols(&tape, qtot_steps);
    Var diff = grad::sub(&tape, qtot, grad::constant(std::move(targets)));
    Var sq = grad::mul(&tape, diff, diff);
    double denom = 0.0;
    for (double f : fill.vec()) denom += f;
    Var loss = grad::scale(&tape, grad::sum(&tape, grad::mul_const(&tape, sq, fill)),
                           1.0 / std::max(denom, 1.0));

    const double loss_value = loss->value.item();
    if (!std::isfinite(loss_value)) {
        throw std::runtime_error(
            "train_step: non-finite loss (batch of " + std::to_string(B) + " episodes, " +
            std::to_string(T) + " max steps, qmin offset " + std::to_string(offset) + ")");
    }
    tape.backward(loss);
    opt.step();
    return loss_value;
}

Trainer::Trainer(std::unique_ptr<SlotEnv> env, ModelConfig mc, TrainConfig tc,
                 std::uint64_t env_layout_seed)
    : env_(std::move(env)), cfg_(tc), layout_seed_(env_layout_seed), master_(tc.seed) {
    cfg_.validate();
    mc.hidden_dim = tc.hidden_dim;
    Rng init_online(mix_seed(tc.seed, 1));
    online_ = std::make_unique<Model>(*env_, mc, init_online);
    Rng init_target(mix_seed(tc.seed, 1));  // same stream: targets start in sync
    target_ = std::make_unique<Model>(*env_, mc, init_target);
    target_->params.set_requires_grad(false);
    nn::AdamConfig ac;
    ac.lr = tc.learning_rate;
    opt_ = std::make_unique<nn::Adam>(online_->params, ac);
}

std::vector<Episode> Trainer::collect_round(double epsilon, std::size_t first_episode_index) {
    const std::size_t k = std::max<std::size_t>(1, cfg_.workers);
    std::vector<Episode> out(k);
    if (k == 1) {
        Rng rng(mix_seed(cfg_.seed, 1000 + first_episode_index));
        out[0] = collect_episode(*env_, *online_, epsilon, rng, layout_seed_);
        return out;
    }
    std::vector<std::thread> threads;
    threads.reserve(k);
    for (std::size_t w = 0; w < k; ++w) {
        threads.emplace_back([&, w] {
            auto env = env_->clone();
            Rng rng(mix_seed(cfg_.seed, 1000 + first_episode_index + w));
            out[w] = collect_episode(*env, *online_, epsilon, rng, layout_seed_);
        });
    }
    for (auto& th : threads) th.join();
    return out;
}

void Trainer::emit_row(const TrainHooks& hooks, const RunResult& result,
                       const EvalStats& stats, double last_loss) {
    if (hooks.on_metrics) {
        MetricsRow row;
        row.step = result.env_steps;
        row.episodes = result.episodes;
        row.loss = last_loss;
        row.epsilon = epsilon_at(result.env_steps, cfg_);
        row.test_mean_return = stats.mean_return;
        row.test_return_std = stats.std_return;
        row.q_min_offset = tracker_.offset();
        hooks.on_metrics(row);
    }
    if (hooks.on_checkpoint) hooks.on_checkpoint(result.env_steps, online_->params);
}

RunResult Trainer::run(const TrainHooks& hooks) {
    ReplayBuffer buffer(cfg_.buffer_size);
    RunResult result;
    Rng sample_rng(mix_seed(cfg_.seed, 2));
    std::size_t next_eval = 0;
    std::size_t last_row_step = static_cast<std::size_t>(-1);
    double last_loss = 0.0;

    while (result.env_steps < cfg_.total_timesteps) {
        const double epsilon = epsilon_at(result.env_steps, cfg_);
        for (Episode& ep : collect_round(epsilon, result.episodes)) {
            result.env_steps += ep.steps;
            ++result.episodes;
            buffer.add(std::move(ep));

            if (buffer.size() >= cfg_.batch_size) {
                auto batch = buffer.sample(cfg_.batch_size, sample_rng);
                last_loss = train_step(batch, *online_, *target_, tracker_, *opt_, cfg_.gamma);
                ++result.train_steps;
            }
            if (result.episodes % cfg_.target_update_interval == 0)
                target_->copy_from(*online_);
        }

        if (result.env_steps >= next_eval) {
            EvalStats stats = evaluate(*env_, *online_, cfg_.test_episodes, layout_seed_);
            emit_row(hooks, result, stats, last_loss);
            last_row_step = result.env_steps;
            result.final_eval = stats;
            while (next_eval <= result.env_steps) next_eval += cfg_.test_interval;
        }
    }

    if (last_row_step != result.env_steps) {
        EvalStats stats = evaluate(*env_, *online_, cfg_.test_episodes, layout_seed_);
        result.final_eval = stats;
        emit_row(hooks, result, stats, last_loss);
    }
    return result;
}

}  // namespace ac::learn
