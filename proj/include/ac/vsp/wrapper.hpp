#pragma once

#include <memory>

#include "ac/env/env.hpp"

namespace ac::vsp {

enum class SlotKind { real, proxy };
enum class SlotPhase { deciding, executing, masked };

struct AgentSlot {
    int slot_id = 0;
    SlotKind kind = SlotKind::real;
    SlotPhase phase = SlotPhase::deciding;
    int paired_real = -1;  // proxies only
};

inline const char* phase_name(SlotPhase p) {
    switch (p) {
        case SlotPhase::deciding: return "deciding";
        case SlotPhase::executing: return "executing";
        default: return "masked";
    }
}

/// Per-step view over 2n slots: n real agents followed by their n proxies.
/// Slot observations of masked slots are zero-filled; the extended state is
/// the fixed layout [base state ; decision obs of each agent], zero where the
/// agent is not executing.
struct WrapStep {
    std::vector<double> base_state;
    std::vector<double> extended_state;
    std::vector<std::vector<double>> slot_obs;               // 2n
    std::vector<std::vector<std::uint8_t>> slot_avail;       // 2n x (action_count+1)
    std::vector<AgentSlot> slots;                            // 2n
    std::vector<int> running_action;                         // per real agent, -1 if idle
    double reward = 0.0;
    bool terminated = false;
};

/// The proxy transformation: while a real agent executes a multi-step action,
/// its proxy slot is unmasked carrying the decision-time observation and the
/// running action; proxies of deciding agents stay masked. Rewards pass
/// through from the base environment unchanged.
class VspWrapper {
public:
    explicit VspWrapper(std::unique_ptr<env::Env> base);

    std::size_t n_agents() const { return n_; }
    std::size_t n_slots() const { return 2 * n_; }
    /// Action ids run over the env's actions plus this blank sentinel.
    int blank_action() const { return static_cast<int>(spec().action_count); }
    const env::EnvSpec& spec() const { return base_->spec(); }
    const env::Env& base() const { return *base_; }
    std::size_t extended_state_dim() const { return spec().state_dim + n_ * spec().obs_dim; }

    WrapStep reset(std::uint64_t seed);

    /// Decisions for slots currently in phase deciding, in slot-id order.
    /// Supplying any other count is a contract error.
    WrapStep step(const std::vector<int>& decisions);

    const WrapStep& current() const { return cur_; }

    std::vector<std::int64_t> save_state() const;
    void load_state(const std::vector<std::int64_t>& key);
    std::unique_ptr<VspWrapper> clone() const;

private:
    void rebuild_view(const env::StepResult& res);

    std::unique_ptr<env::Env> base_;
    std::size_t n_ = 0;
    std::vector<int> running_;                    // per agent; -1 when idle
    std::vector<std::vector<double>> decision_obs_;  // valid while executing
    WrapStep cur_;
};

/// Per-slot allowed actions for the current step: deciding reals get the env
/// availability (blank excluded), executing reals only blank, unmasked
/// proxies the singleton running action, masked proxies nothing.
std::vector<std::vector<std::uint8_t>> action_mask(const WrapStep& ws, std::size_t action_count);

}  // namespace ac::vsp
