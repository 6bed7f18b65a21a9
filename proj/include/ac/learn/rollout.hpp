#pragma once

#include "ac/learn/episode.hpp"
#include "ac/learn/model.hpp"

namespace ac::learn {

/// Rolls one episode with epsilon-greedy selection under the per-slot allowed
/// sets. Slots with a single allowed action take it without consuming
/// randomness; masked slots record the blank sentinel. Collection-time chosen
/// utilities are stored for diagnostics.
Episode collect_episode(SlotEnv& env, const Model& model, double epsilon, Rng& rng,
                        std::uint64_t env_seed);

struct EvalStats {
    double mean_return = 0.0;
    double std_return = 0.0;
    double success_rate = 0.0;  // fraction of episodes that truly terminated
    double mean_length = 0.0;
};

/// Greedy (epsilon = 0) evaluation rollouts.
EvalStats evaluate(SlotEnv& env, const Model& model, std::size_t episodes,
                   std::uint64_t env_seed);

}  // namespace ac::learn
