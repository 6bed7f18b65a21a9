#pragma once

#include <memory>

#include "ac/grad/ops.hpp"
#include "ac/nn/layers.hpp"

namespace ac::mix {

/// Batched mixer input. Rows are (episode, step) samples. Slots 0..n-1 are
/// the real agents; under the proxy wrapper slots n..2n-1 are their proxies,
/// otherwise n_slots == n and the proxy masks are all zero.
struct MixerBatch {
    grad::Var utilities;   // [B, S] per-slot chosen-action utilities
    grad::Var state;       // [B, D] mixing-state features, constant
    Tensor util_mask;      // [B, S] 1 = slot participates
    Tensor deciding_mask;  // [B, n] 1 = real slot is deciding
    Tensor proxy_mask;     // [B, n] 1 = proxy slot is unmasked
    std::size_t n_agents = 0;
    std::size_t n_slots = 0;
    double qmin_offset = 0.0;  // current tracker offset, shared with targets
};

class Mixer {
public:
    virtual ~Mixer() = default;
    virtual grad::Var forward(grad::Tape* t, const MixerBatch& in) = 0;
};

/// Unit-weight additive mixing: the sum of active slot utilities.
class AdditiveMixer final : public Mixer {
public:
    grad::Var forward(grad::Tape* t, const MixerBatch& in) override {
        return grad::row_sum(t, grad::mul_const(t, in.utilities, in.util_mask));
    }
};

/// Two-layer monotonic mixing with hypernetwork weights passed through
/// absolute value, plus a state-value bias.
class MonotonicMixer final : public Mixer {
public:
    MonotonicMixer(nn::ParamSet& ps, const std::string& name, std::size_t state_dim,
                   std::size_t n_slots, std::size_t embed, std::size_t hyper_hidden,
                   Rng& rng);

    grad::Var forward(grad::Tape* t, const MixerBatch& in) override;

private:
    nn::HyperHead hw1_, hb1_, hw2_, hv_;
    std::size_t embed_ = 0;
    std::size_t n_slots_ = 0;
};

enum class HeadMode { direct, softmax, mlp };

HeadMode head_mode_from(const std::string& s);
const char* head_mode_name(HeadMode m);

/// Weight snapshot for credit traces: per-slot |f_i| and per-(deciding,
/// proxy) pair |f_id,ic'| values, averaged over heads.
struct MixWeights {
    Tensor slot;  // [B, S]
    Tensor pair;  // [B, n*n], zero where the pair is invalid
};

/// The practical multiplicative mixer: per head,
///   head = f0(s) + sum_i |f_i(s)| Q_i
///        + sum_{id,jc'} |f_{id jc'}(s)| (Q_jc' + offset)/2 * Q_id     (order>=2)
///        + sum_{id,j<k} |f(s)| (Q_j'+off)/2 (Q_k'+off)/2 * Q_id      (order>=3)
/// combined across heads per the head mode: direct uses the single head,
/// softmax mixes heads with state-derived convex weights, mlp feeds heads
/// through a rectified perceptron with absolute-valued weights. Every path is
/// monotone in each deciding utility.
class PracticalMvdMixer final : public Mixer {
public:
    PracticalMvdMixer(nn::ParamSet& ps, const std::string& name, std::size_t state_dim,
                      std::size_t n_agents, std::size_t n_slots, int order, HeadMode mode,
                      std::size_t heads, std::size_t hyper_hidden, Rng& rng);

    grad::Var forward(grad::Tape* t, const MixerBatch& in) override;

    MixWeights weights(const MixerBatch& in) const;

    int order() const { return order_; }
    HeadMode mode() const { return mode_; }
    std::size_t heads() const { return heads_; }

private:
    grad::Var head_value(grad::Tape* t, std::size_t h, const MixerBatch& in,
                         const grad::Var& qm, const grad::Var& s) const;

    struct Head {
        nn::HyperHead f0, fi, fpair, ftri;
    };
    std::vector<Head> heads_nets_;
    nn::HyperHead logits_;          // softmax mode
    nn::Linear mlp1_, mlp2_;        // mlp mode
    std::size_t n_agents_ = 0, n_slots_ = 0, heads_ = 1;
    int order_ = 2;
    HeadMode mode_ = HeadMode::direct;
    std::vector<std::pair<int, int>> proxy_pairs_;  // j<k combos for order 3
};

}  // namespace ac::mix
