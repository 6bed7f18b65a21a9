#pragma once

#include <memory>

#include "ac/env/env.hpp"
#include "ac/vsp/padding.hpp"
#include "ac/vsp/wrapper.hpp"

namespace ac::learn {

enum class WrapperMode { vsp, pad_blank, pad_recent, discard, none };

WrapperMode wrapper_mode_from(const std::string& s);
const char* wrapper_mode_name(WrapperMode m);

/// Uniform per-step view the learner consumes, independent of the wrapper:
/// a fixed number of slots, each with an observation and an allowed-action
/// row over env actions + blank. A slot with an all-zero allowed row is
/// masked (records blank, contributes nothing).
struct SlotView {
    std::vector<double> mix_state;
    std::vector<std::vector<double>> slot_obs;
    std::vector<std::vector<std::uint8_t>> avail;  // [n_slots][action_count+1]
    std::vector<double> util_mask;                 // [n_slots]
    std::vector<double> deciding_mask;             // [n_agents]
    std::vector<double> proxy_mask;                // [n_agents]
    double reward = 0.0;
    bool terminated = false;
};

/// Slot-level adapter over a wrapped or raw environment.
class SlotEnv {
public:
    virtual ~SlotEnv() = default;
    virtual std::size_t n_agents() const = 0;
    virtual std::size_t n_slots() const = 0;
    virtual std::size_t obs_dim() const = 0;
    virtual std::size_t action_width() const = 0;  // env actions + blank
    virtual std::size_t mix_state_dim() const = 0;
    virtual std::size_t episode_limit() const = 0;
    virtual SlotView reset(std::uint64_t seed) = 0;
    /// Takes one action per slot; actions of masked/forced slots are checked
    /// against the allowed rows and passed to the underlying wrapper.
    virtual SlotView step(const std::vector<int>& slot_actions) = 0;
    virtual std::unique_ptr<SlotEnv> clone() const = 0;
};

/// Builds the adapter for a wrapper mode (discard has its own training path
/// and no slot adapter).
std::unique_ptr<SlotEnv> make_slot_env(const env::Env& proto, WrapperMode mode,
                                       bool use_extended_state);

}  // namespace ac::learn
