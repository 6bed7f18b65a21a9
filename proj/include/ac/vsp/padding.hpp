#pragma once

#include <memory>

#include "ac/env/env.hpp"

namespace ac::vsp {

enum class PaddingMode { blank, recent };

/// Per-step view of the padded (synchronous-looking) game: every agent gets a
/// slot every step; non-deciding agents are pinned to the padding action for
/// the mode (blank sentinel, or their most recent choice).
struct PadStep {
    std::vector<double> state;
    std::vector<std::vector<double>> obs;                // n agents
    std::vector<std::vector<std::uint8_t>> slot_avail;   // n x (action_count+1)
    std::vector<std::uint8_t> deciding;                  // per agent
    std::vector<int> padded_action;                      // forced id, -1 when deciding
    double reward = 0.0;
    bool terminated = false;
};

/// Synchronization baseline without proxies: executing agents are padded per
/// mode and every slot is presented as choosing (with a singleton allowed
/// set when padded).
class PaddingWrapper {
public:
    PaddingWrapper(std::unique_ptr<env::Env> base, PaddingMode mode);

    std::size_t n_slots() const { return base_->spec().n_agents; }
    int blank_action() const { return static_cast<int>(base_->spec().action_count); }
    const env::EnvSpec& spec() const { return base_->spec(); }
    PaddingMode mode() const { return mode_; }

    PadStep reset(std::uint64_t seed);
    /// Decisions for deciding agents in agent order; padded slots take their
    /// forced action regardless.
    PadStep step(const std::vector<int>& decisions);
    const PadStep& current() const { return cur_; }
    std::unique_ptr<PaddingWrapper> clone() const;

private:
    void rebuild_view(const env::StepResult& res);

    std::unique_ptr<env::Env> base_;
    PaddingMode mode_;
    std::vector<int> running_;      // running action while executing, -1 idle
    std::vector<int> last_choice_;  // most recent committed action
    PadStep cur_;
};

}  // namespace ac::vsp
