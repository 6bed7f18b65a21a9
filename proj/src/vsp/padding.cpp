#include "ac/vsp/padding.hpp"

#include <stdexcept>

namespace ac::vsp {

PaddingWrapper::PaddingWrapper(std::unique_ptr<env::Env> base, PaddingMode mode)
    : base_(std::move(base)), mode_(mode) {
    const std::size_t n = base_->spec().n_agents;
    running_.assign(n, -1);
    last_choice_.assign(n, -1);
}

PadStep PaddingWrapper::reset(std::uint64_t seed) {
    env::StepResult res = base_->reset(seed);
    running_.assign(running_.size(), -1);
    last_choice_.assign(last_choice_.size(), -1);
    rebuild_view(res);
    return cur_;
}

PadStep PaddingWrapper::step(const std::vector<int>& decisions) {
    const std::size_t n = base_->spec().n_agents;
    const env::StepResult before = base_->view();
    std::vector<int> joint(n, 0);
    std::vector<int> committed_now(n, -1);
    std::size_t supplied = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (before.decision_mask[i]) {
            if (supplied >= decisions.size())
                throw std::invalid_argument("padding: too few decisions");
            joint[i] = decisions[supplied++];
            committed_now[i] = joint[i];
        } else {
            joint[i] = running_[i] >= 0 ? running_[i] : 0;
        }
    }
    if (supplied != decisions.size())
        throw std::invalid_argument("padding: decision supplied for a padded slot");

    env::StepResult res = base_->step(joint);
    for (std::size_t i = 0; i < n; ++i) {
        if (committed_now[i] >= 0) last_choice_[i] = committed_now[i];
        if (res.decision_mask[i] || res.terminated) {
            running_[i] = -1;
        } else if (committed_now[i] >= 0) {
            running_[i] = committed_now[i];
        }
    }
    rebuild_view(res);
    cur_.reward = res.reward;
    return cur_;
}

void PaddingWrapper::rebuild_view(const env::StepResult& res) {
    const auto& sp = base_->spec();
    const std::size_t n = sp.n_agents;
    PadStep ps;
    ps.state = res.state;
    ps.obs = res.obs;
    ps.terminated = res.terminated;
    ps.deciding.resize(n);
    ps.padded_action.assign(n, -1);
    const std::size_t width = sp.action_count + 1;
    ps.slot_avail.assign(n, std::vector<std::uint8_t>(width, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const bool deciding = res.decision_mask[i] != 0;
        ps.deciding[i] = deciding ? 1 : 0;
        if (deciding) {
            for (std::size_t a = 0; a < sp.action_count; ++a)
                ps.slot_avail[i][a] = res.available[i][a];
        } else if (!res.terminated) {
            int pad;
            if (mode_ == PaddingMode::blank) {
                pad = static_cast<int>(sp.action_count);
            } else {
                pad = last_choice_[i] >= 0 ? last_choice_[i] : static_cast<int>(sp.action_count);
            }
            ps.padded_action[i] = pad;
            ps.slot_avail[i][static_cast<std::size_t>(pad)] = 1;
        }
    }
    cur_ = std::move(ps);
}

std::unique_ptr<PaddingWrapper> PaddingWrapper::clone() const {
    auto copy = std::make_unique<PaddingWrapper>(base_->clone(), mode_);
    copy->running_ = running_;
    copy->last_choice_ = last_choice_;
    copy->cur_ = cur_;
    return copy;
}

}  // namespace ac::vsp
