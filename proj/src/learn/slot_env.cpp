#include "ac/learn/slot_env.hpp"

#include <stdexcept>

namespace ac::learn {

WrapperMode wrapper_mode_from(const std::string& s) {
    if (s == "vsp") return WrapperMode::vsp;
    if (s == "pad_blank") return WrapperMode::pad_blank;
    if (s == "pad_recent") return WrapperMode::pad_recent;
    if (s == "discard") return WrapperMode::discard;
    if (s == "none") return WrapperMode::none;
    throw std::invalid_argument("unknown wrapper mode '" + s + "'");
}

const char* wrapper_mode_name(WrapperMode m) {
    switch (m) {
        case WrapperMode::vsp: return "vsp";
        case WrapperMode::pad_blank: return "pad_blank";
        case WrapperMode::pad_recent: return "pad_recent";
        case WrapperMode::discard: return "discard";
        default: return "none";
    }
}

namespace {

class VspSlotEnv final : public SlotEnv {
public:
    VspSlotEnv(std::unique_ptr<env::Env> base, bool extended)
        : w_(std::make_unique<vsp::VspWrapper>(std::move(base))), extended_(extended) {}
    VspSlotEnv(std::unique_ptr<vsp::VspWrapper> w, bool extended)
        : w_(std::move(w)), extended_(extended) {}

    std::size_t n_agents() const override { return w_->n_agents(); }
    std::size_t n_slots() const override { return w_->n_slots(); }
    std::size_t obs_dim() const override { return w_->spec().obs_dim; }
    std::size_t action_width() const override { return w_->spec().action_count + 1; }
    std::size_t mix_state_dim() const override {
        return extended_ ? w_->extended_state_dim() : w_->spec().state_dim;
    }
    std::size_t episode_limit() const override { return w_->spec().episode_limit; }

    SlotView reset(std::uint64_t seed) override { return view(w_->reset(seed)); }

    SlotView step(const std::vector<int>& slot_actions) override {
        // forward only the deciding slots' choices
        std::vector<int> decisions;
        for (const auto& slot : w_->current().slots)
            if (slot.phase == vsp::SlotPhase::deciding)
                decisions.push_back(slot_actions[static_cast<std::size_t>(slot.slot_id)]);
        return view(w_->step(decisions));
    }

    std::unique_ptr<SlotEnv> clone() const override {
        return std::make_unique<VspSlotEnv>(w_->clone(), extended_);
    }

private:
    SlotView view(const vsp::WrapStep& ws) {
        SlotView v;
        v.mix_state = extended_ ? ws.extended_state : ws.base_state;
        v.slot_obs = ws.slot_obs;
        v.avail = ws.slot_avail;
        const std::size_t n = w_->n_agents();
        v.util_mask.assign(2 * n, 0.0);
        v.deciding_mask.assign(n, 0.0);
        v.proxy_mask.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            // real slots always mix (deciding or executing with blank)
            if (!ws.terminated) v.util_mask[i] = 1.0;
            if (ws.slots[i].phase == vsp::SlotPhase::deciding) v.deciding_mask[i] = 1.0;
            if (ws.slots[n + i].phase == vsp::SlotPhase::executing) {
                v.util_mask[n + i] = 1.0;
                v.proxy_mask[i] = 1.0;
            }
        }
        v.reward = ws.reward;
        v.terminated = ws.terminated;
        return v;
    }

    std::unique_ptr<vsp::VspWrapper> w_;
    bool extended_;
};

class PadSlotEnv final : public SlotEnv {
public:
    PadSlotEnv(std::unique_ptr<env::Env> base, vsp::PaddingMode mode)
        : w_(std::make_unique<vsp::PaddingWrapper>(std::move(base), mode)) {}
    explicit PadSlotEnv(std::unique_ptr<vsp::PaddingWrapper> w) : w_(std::move(w)) {}

    std::size_t n_agents() const override { return w_->spec().n_agents; }
    std::size_t n_slots() const override { return w_->spec().n_agents; }
    std::size_t obs_dim() const override { return w_->spec().obs_dim; }
    std::size_t action_width() const override { return w_->spec().action_count + 1; }
    std::size_t mix_state_dim() const override { return w_->spec().state_dim; }
    std::size_t episode_limit() const override { return w_->spec().episode_limit; }

    SlotView reset(std::uint64_t seed) override { return view(w_->reset(seed)); }

    SlotView step(const std::vector<int>& slot_actions) override {
        std::vector<int> decisions;
        const auto& cur = w_->current();
        for (std::size_t i = 0; i < cur.deciding.size(); ++i)
            if (cur.deciding[i]) decisions.push_back(slot_actions[i]);
        return view(w_->step(decisions));
    }

    std::unique_ptr<SlotEnv> clone() const override {
        return std::make_unique<PadSlotEnv>(w_->clone());
    }

private:
    SlotView view(const vsp::PadStep& ps) {
        SlotView v;
        v.mix_state = ps.state;
        v.slot_obs = ps.obs;
        v.avail = ps.slot_avail;
        const std::size_t n = n_agents();
        v.util_mask.assign(n, ps.terminated ? 0.0 : 1.0);
        v.deciding_mask.assign(n, 0.0);
        v.proxy_mask.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (ps.deciding[i]) v.deciding_mask[i] = 1.0;
        v.reward = ps.reward;
        v.terminated = ps.terminated;
        return v;
    }

    std::unique_ptr<vsp::PaddingWrapper> w_;
};

class RawSlotEnv final : public SlotEnv {
public:
    explicit RawSlotEnv(std::unique_ptr<env::Env> base) : env_(std::move(base)) {}

    std::size_t n_agents() const override { return env_->spec().n_agents; }
    std::size_t n_slots() const override { return env_->spec().n_agents; }
    std::size_t obs_dim() const override { return env_->spec().obs_dim; }
    std::size_t action_width() const override { return env_->spec().action_count + 1; }
    std::size_t mix_state_dim() const override { return env_->spec().state_dim; }
    std::size_t episode_limit() const override { return env_->spec().episode_limit; }

    SlotView reset(std::uint64_t seed) override { return view(env_->reset(seed)); }

    SlotView step(const std::vector<int>& slot_actions) override {
        const auto before = env_->view();
        std::vector<int> joint(n_agents(), 0);
        for (std::size_t i = 0; i < joint.size(); ++i) {
            const int blank = static_cast<int>(env_->spec().action_count);
            joint[i] = before.decision_mask[i] && slot_actions[i] != blank ? slot_actions[i] : 0;
        }
        return view(env_->step(joint));
    }

    std::unique_ptr<SlotEnv> clone() const override {
        return std::make_unique<RawSlotEnv>(env_->clone());
    }

private:
    SlotView view(const env::StepResult& res) {
        SlotView v;
        v.mix_state = res.state;
        v.slot_obs = res.obs;
        const std::size_t n = n_agents();
        v.avail.assign(n, std::vector<std::uint8_t>(action_width(), 0));
        v.util_mask.assign(n, 0.0);
        v.deciding_mask.assign(n, 0.0);
        v.proxy_mask.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (res.decision_mask[i]) {
                for (std::size_t a = 0; a < env_->spec().action_count; ++a)
                    v.avail[i][a] = res.available[i][a];
                v.util_mask[i] = 1.0;
                v.deciding_mask[i] = 1.0;
            }
            // executing agents stay fully masked: no padding, no proxy
        }
        v.reward = res.reward;
        v.terminated = res.terminated;
        return v;
    }

    std::unique_ptr<env::Env> env_;
};

}  // namespace

std::unique_ptr<SlotEnv> make_slot_env(const env::Env& proto, WrapperMode mode,
                                       bool use_extended_state) {
    switch (mode) {
        case WrapperMode::vsp:
            return std::make_unique<VspSlotEnv>(proto.clone(), use_extended_state);
        case WrapperMode::pad_blank:
            return std::make_unique<PadSlotEnv>(proto.clone(), vsp::PaddingMode::blank);
        case WrapperMode::pad_recent:
            return std::make_unique<PadSlotEnv>(proto.clone(), vsp::PaddingMode::recent);
        case WrapperMode::none:
            return std::make_unique<RawSlotEnv>(proto.clone());
        case WrapperMode::discard:
            throw std::invalid_argument("discard mode trains on macro streams, not slots");
    }
    throw std::logic_error("unreachable");
}

}  // namespace ac::learn
