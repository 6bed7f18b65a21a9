#pragma once

#include <memory>
#include <string>

#include "ac/learn/slot_env.hpp"
#include "ac/mix/mixer.hpp"
#include "ac/nn/layers.hpp"

namespace ac::learn {

enum class MixerFamily { additive, monotonic, mvd };

MixerFamily mixer_family_from(const std::string& s);
const char* mixer_family_name(MixerFamily f);

struct ModelConfig {
    MixerFamily family = MixerFamily::mvd;
    int order = 2;
    mix::HeadMode head_mode = mix::HeadMode::mlp;
    std::size_t heads = 4;
    std::size_t hidden_dim = 64;
    std::size_t hyper_hidden = 64;
    std::size_t mix_embed = 32;
};

/// One full set of trainables: the shared recurrent utility network (used by
/// every slot, proxies included) plus the mixing head. Target copies are a
/// second Model synced by value.
struct Model {
    nn::ParamSet params;
    nn::GruAgentNet net;
    std::unique_ptr<mix::Mixer> mixer;
    ModelConfig cfg;
    std::size_t n_agents = 0, n_slots = 0, obs_dim = 0, action_width = 0, mix_state_dim = 0;

    Model(const SlotEnv& env, const ModelConfig& mc, Rng& rng)
        : cfg(mc),
          n_agents(env.n_agents()),
          n_slots(env.n_slots()),
          obs_dim(env.obs_dim()),
          action_width(env.action_width()),
          mix_state_dim(env.mix_state_dim()) {
        const std::size_t in_dim = obs_dim + action_width + n_agents;
        net = nn::GruAgentNet(params, "agent", in_dim, mc.hidden_dim, action_width, rng);
        switch (mc.family) {
            case MixerFamily::additive:
                mixer = std::make_unique<mix::AdditiveMixer>();
                break;
            case MixerFamily::monotonic:
                mixer = std::make_unique<mix::MonotonicMixer>(params, "mix", mix_state_dim,
                                                              n_slots, mc.mix_embed,
                                                              mc.hyper_hidden, rng);
                break;
            case MixerFamily::mvd:
                mixer = std::make_unique<mix::PracticalMvdMixer>(
                    params, "mix", mix_state_dim, n_agents, n_slots, mc.order, mc.head_mode,
                    mc.heads, mc.hyper_hidden, rng);
                break;
        }
    }

    void copy_from(const Model& src) { params.copy_values_from(src.params); }

    mix::PracticalMvdMixer* practical() const {
        return dynamic_cast<mix::PracticalMvdMixer*>(mixer.get());
    }

    /// Input row layout: [obs ; previous action one-hot ; agent id one-hot];
    /// proxies carry their paired agent's id.
    void fill_input_row(double* dst, const double* obs, int prev_action,
                        std::size_t slot) const {
        std::size_t o = 0;
        for (std::size_t d = 0; d < obs_dim; ++d) dst[o++] = obs[d];
        for (std::size_t a = 0; a < action_width; ++a)
            dst[o++] = (prev_action >= 0 && static_cast<std::size_t>(prev_action) == a) ? 1.0
                                                                                        : 0.0;
        const std::size_t id = slot % n_agents;
        for (std::size_t i = 0; i < n_agents; ++i) dst[o++] = i == id ? 1.0 : 0.0;
    }

    std::size_t input_dim() const { return obs_dim + action_width + n_agents; }
};

}  // namespace ac::learn
