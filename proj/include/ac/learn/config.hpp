#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ac::learn {

/// Training hyperparameters. Defaults follow the experimental settings the
/// framework was tuned against; runs override them through the config file.
struct TrainConfig {
    std::size_t batch_size = 32;
    std::size_t buffer_size = 5000;
    double gamma = 0.99;
    double eps_start = 1.0;
    double eps_finish = 0.05;
    std::size_t eps_anneal_steps = 50000;
    std::size_t target_update_interval = 200;  // trained episodes between hard syncs
    std::size_t test_interval = 2000;          // env steps between evaluations
    std::size_t test_episodes = 20;
    std::size_t total_timesteps = 50000;
    double learning_rate = 0.0005;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t hidden_dim = 64;

    void validate() const {
        if (!(eps_finish >= 0.0 && eps_finish <= eps_start && eps_start <= 1.0))
            throw std::invalid_argument("config: need 0 <= eps_finish <= eps_start <= 1");
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw std::invalid_argument("config: gamma must be in [0, 1)");
        if (batch_size > buffer_size)
            throw std::invalid_argument("config: batch_size must not exceed buffer_size");
        if (batch_size == 0 || buffer_size == 0 || test_episodes == 0)
            throw std::invalid_argument("config: zero-sized batch/buffer/test settings");
    }
};

/// Linear anneal from eps_start to eps_finish over eps_anneal_steps, constant
/// afterwards.
inline double epsilon_at(std::size_t step, const TrainConfig& cfg) {
    if (cfg.eps_anneal_steps == 0 || step >= cfg.eps_anneal_steps) return cfg.eps_finish;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg.eps_anneal_steps);
    return cfg.eps_start - (cfg.eps_start - cfg.eps_finish) * frac;
}

}  // namespace ac::learn
