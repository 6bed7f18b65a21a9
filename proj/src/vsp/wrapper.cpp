#include "ac/vsp/wrapper.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ac::vsp {

VspWrapper::VspWrapper(std::unique_ptr<env::Env> base)
    : base_(std::move(base)), n_(base_->spec().n_agents) {
    running_.assign(n_, -1);
    decision_obs_.assign(n_, {});
}

WrapStep VspWrapper::reset(std::uint64_t seed) {
    env::StepResult res = base_->reset(seed);
    running_.assign(n_, -1);
    decision_obs_.assign(n_, {});
    rebuild_view(res);
    return cur_;
}

WrapStep VspWrapper::step(const std::vector<int>& decisions) {
    // deciding slots in order; the base step gets the running action for
    // executing agents (it ignores them either way)
    std::vector<int> joint(n_, 0);
    std::vector<int> committed_now(n_, -1);
    std::size_t supplied = 0;
    const env::StepResult before = base_->view();
    for (std::size_t i = 0; i < n_; ++i) {
        if (before.decision_mask[i]) {
            if (supplied >= decisions.size())
                throw std::invalid_argument("vsp: too few decisions for deciding slots");
            joint[i] = decisions[supplied++];
            committed_now[i] = joint[i];
        } else {
            joint[i] = running_[i] >= 0 ? running_[i] : 0;
        }
    }
    if (supplied != decisions.size())
        throw std::invalid_argument("vsp: decision supplied for a non-deciding slot");

    env::StepResult res = base_->step(joint);

    for (std::size_t i = 0; i < n_; ++i) {
        if (res.decision_mask[i] || res.terminated) {
            // action finished (or never spanned steps): the pair dissolves
            running_[i] = -1;
            decision_obs_[i].clear();
        } else if (committed_now[i] >= 0) {
            // newly committed multi-step action: record the decision context
            running_[i] = committed_now[i];
            decision_obs_[i] = before.obs[i];
        }
    }
    rebuild_view(res);
    cur_.reward = res.reward;
    return cur_;
}

void VspWrapper::rebuild_view(const env::StepResult& res) {
    const auto& sp = base_->spec();
    WrapStep ws;
    ws.base_state = res.state;
    ws.terminated = res.terminated;
    ws.running_action = running_;

    ws.extended_state = res.state;
    ws.extended_state.resize(extended_state_dim(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        if (!decision_obs_[i].empty()) {
            std::copy(decision_obs_[i].begin(), decision_obs_[i].end(),
                      ws.extended_state.begin() +
                          static_cast<std::ptrdiff_t>(sp.state_dim + i * sp.obs_dim));
        }
    }

    ws.slots.resize(2 * n_);
    ws.slot_obs.assign(2 * n_, std::vector<double>(sp.obs_dim, 0.0));
    for (std::size_t i = 0; i < n_; ++i) {
        const bool deciding = res.decision_mask[i] != 0;
        AgentSlot& real = ws.slots[i];
        real.slot_id = static_cast<int>(i);
        real.kind = SlotKind::real;
        real.phase = deciding ? SlotPhase::deciding : SlotPhase::executing;
        ws.slot_obs[i] = res.obs[i];

        AgentSlot& proxy = ws.slots[n_ + i];
        proxy.slot_id = static_cast<int>(n_ + i);
        proxy.kind = SlotKind::proxy;
        proxy.paired_real = static_cast<int>(i);
        const bool unmasked = !deciding && running_[i] >= 0 && !res.terminated;
        proxy.phase = unmasked ? SlotPhase::executing : SlotPhase::masked;
        if (unmasked) ws.slot_obs[n_ + i] = decision_obs_[i];
    }
    if (res.terminated) {
        for (std::size_t i = 0; i < n_; ++i) ws.slots[i].phase = SlotPhase::masked;
    }

    // per-slot allowed actions over env actions + blank
    const std::size_t width = sp.action_count + 1;
    ws.slot_avail.assign(2 * n_, std::vector<std::uint8_t>(width, 0));
    for (std::size_t i = 0; i < n_; ++i) {
        if (ws.slots[i].phase == SlotPhase::deciding) {
            for (std::size_t a = 0; a < sp.action_count; ++a)
                ws.slot_avail[i][a] = res.available[i][a];
        } else if (ws.slots[i].phase == SlotPhase::executing) {
            ws.slot_avail[i][sp.action_count] = 1;  // blank only
        }
        if (ws.slots[n_ + i].phase == SlotPhase::executing)
            ws.slot_avail[n_ + i][static_cast<std::size_t>(running_[i])] = 1;
    }
    cur_ = std::move(ws);
}

std::vector<std::int64_t> VspWrapper::save_state() const {
    std::vector<std::int64_t> key = base_->save_state();
    key.push_back(static_cast<std::int64_t>(key.size()));  // base length marker
    for (std::size_t i = 0; i < n_; ++i) {
        key.push_back(running_[i]);
        if (running_[i] >= 0) {
            // exact: keep the raw bit patterns of the recorded observation
            for (double v : decision_obs_[i]) key.push_back(std::bit_cast<std::int64_t>(v));
        }
    }
    return key;
}

void VspWrapper::load_state(const std::vector<std::int64_t>& key) {
    // recover the base length marker: scan is not needed, recompute instead
    std::vector<std::int64_t> probe = base_->save_state();
    const std::size_t base_len = probe.size();
    std::vector<std::int64_t> base_key(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(base_len));
    base_->load_state(base_key);
    std::size_t pos = base_len;
    if (key.at(pos) != static_cast<std::int64_t>(base_len))
        throw std::invalid_argument("vsp: corrupt state key");
    ++pos;
    const std::size_t obs_dim = base_->spec().obs_dim;
    for (std::size_t i = 0; i < n_; ++i) {
        running_[i] = static_cast<int>(key.at(pos++));
        decision_obs_[i].clear();
        if (running_[i] >= 0) {
            decision_obs_[i].resize(obs_dim);
            for (std::size_t d = 0; d < obs_dim; ++d)
                decision_obs_[i][d] = std::bit_cast<double>(key.at(pos++));
        }
    }
    rebuild_view(base_->view());
}

std::unique_ptr<VspWrapper> VspWrapper::clone() const {
    auto copy = std::make_unique<VspWrapper>(base_->clone());
    copy->running_ = running_;
    copy->decision_obs_ = decision_obs_;
    copy->cur_ = cur_;
    return copy;
}

std::vector<std::vector<std::uint8_t>> action_mask(const WrapStep& ws, std::size_t /*action_count*/) {
    return ws.slot_avail;
}

}  // namespace ac::vsp
