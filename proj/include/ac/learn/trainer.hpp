#pragma once

#include <functional>
#include <optional>

#include "ac/learn/config.hpp"
#include "ac/learn/replay.hpp"
#include "ac/learn/rollout.hpp"
#include "ac/mix/qmin.hpp"
#include "ac/nn/adam.hpp"

namespace ac::learn {

struct MetricsRow {
    std::size_t step = 0;
    std::size_t episodes = 0;
    double loss = 0.0;
    double epsilon = 0.0;
    double test_mean_return = 0.0;
    double test_return_std = 0.0;
    double q_min_offset = 0.0;
};

struct TrainHooks {
    std::function<void(const MetricsRow&)> on_metrics;
    std::function<void(std::size_t step, const nn::ParamSet&)> on_checkpoint;
};

/// One TD update over a sampled batch of episodes: recurrent forward for all
/// slots, chosen-utility mixing, bootstrapped targets from the target model
/// with per-decider greedy actions under the allowed sets, masked MSE.
/// Updates the proxy-minimum tracker from the batch before mixing.
double train_step(const std::vector<const Episode*>& batch, Model& online, Model& target,
                  mix::QminTracker& tracker, nn::Adam& opt, double gamma);

struct RunResult {
    EvalStats final_eval;
    std::size_t env_steps = 0;
    std::size_t episodes = 0;
    std::size_t train_steps = 0;
};

/// The training loop: collect an episode (optionally with parallel workers),
/// store, train once per collected episode when the buffer can fill a batch,
/// hard-sync targets every target_update_interval trained episodes, evaluate
/// every test_interval env steps.
class Trainer {
public:
    Trainer(std::unique_ptr<SlotEnv> env, ModelConfig mc, TrainConfig tc,
            std::uint64_t env_layout_seed);

    RunResult run(const TrainHooks& hooks = {});

    Model& online() { return *online_; }
    const TrainConfig& config() const { return cfg_; }
    mix::QminTracker& tracker() { return tracker_; }

private:
    std::vector<Episode> collect_round(double epsilon, std::size_t first_episode_index);
    void emit_row(const TrainHooks& hooks, const RunResult& result, const EvalStats& stats,
                  double last_loss);

    std::unique_ptr<SlotEnv> env_;
    TrainConfig cfg_;
    std::uint64_t layout_seed_;
    Rng master_;
    std::unique_ptr<Model> online_, target_;
    std::unique_ptr<nn::Adam> opt_;
    mix::QminTracker tracker_;
};

}  // namespace ac::learn
