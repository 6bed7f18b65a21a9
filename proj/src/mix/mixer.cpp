#include "ac/mix/mixer.hpp"

#include <stdexcept>

namespace ac::mix {

using namespace grad;

MonotonicMixer::MonotonicMixer(nn::ParamSet& ps, const std::string& name,
                               std::size_t state_dim, std::size_t n_slots,
                               std::size_t embed, std::size_t hyper_hidden, Rng& rng)
    : hw1_(ps, name + ".hw1", state_dim, hyper_hidden, n_slots * embed, rng),
      hb1_(ps, name + ".hb1", state_dim, hyper_hidden, embed, rng),
      hw2_(ps, name + ".hw2", state_dim, hyper_hidden, embed, rng),
      hv_(ps, name + ".hv", state_dim, hyper_hidden, 1, rng),
      embed_(embed),
      n_slots_(n_slots) {}

Var MonotonicMixer::forward(Tape* t, const MixerBatch& in) {
    Var qm = mul_const(t, in.utilities, in.util_mask);
    Var w1 = abs_op(t, hw1_.forward(t, in.state));
    Var hidden = elu(t, add(t, rowwise_matvec(t, w1, qm, embed_), hb1_.forward(t, in.state)));
    Var w2 = abs_op(t, hw2_.forward(t, in.state));
    return add(t, row_sum(t, mul(t, w2, hidden)), hv_.forward(t, in.state));
}

HeadMode head_mode_from(const std::string& s) {
    if (s == "direct") return HeadMode::direct;
    if (s == "softmax") return HeadMode::softmax;
    if (s == "mlp") return HeadMode::mlp;
    throw std::invalid_argument("unknown head mode '" + s + "'");
}

const char* head_mode_name(HeadMode m) {
    switch (m) {
        case HeadMode::direct: return "direct";
        case HeadMode::softmax: return "softmax";
        default: return "mlp";
    }
}

PracticalMvdMixer::PracticalMvdMixer(nn::ParamSet& ps, const std::string& name,
                                     std::size_t state_dim, std::size_t n_agents,
                                     std::size_t n_slots, int order, HeadMode mode,
                                     std::size_t heads, std::size_t hyper_hidden, Rng& rng)
    : n_agents_(n_agents),
      n_slots_(n_slots),
      heads_(mode == HeadMode::direct ? 1 : heads),
      order_(order),
      mode_(mode) {
    if (order_ < 1 || static_cast<std::size_t>(order_) > n_agents_)
        throw std::invalid_argument("mixer order out of range [1, n]");
    if (heads_ == 0) throw std::invalid_argument("head count must be positive");

    for (int j = 0; j < static_cast<int>(n_agents_); ++j)
        for (int k = j + 1; k < static_cast<int>(n_agents_); ++k)
            proxy_pairs_.emplace_back(j, k);

    const bool with_pairs = order_ >= 2 && n_slots_ == 2 * n_agents_;
    const bool with_triples = order_ >= 3 && n_slots_ == 2 * n_agents_;
    for (std::size_t h = 0; h < heads_; ++h) {
        const std::string base = name + ".head" + std::to_string(h);
        Head hd;
        hd.f0 = nn::HyperHead(ps, base + ".f0", state_dim, hyper_hidden, 1, rng);
        hd.fi = nn::HyperHead(ps, base + ".fi", state_dim, hyper_hidden, n_slots_, rng);
        if (with_pairs)
            hd.fpair = nn::HyperHead(ps, base + ".fpair", state_dim, hyper_hidden,
                                     n_agents_ * n_agents_, rng);
        if (with_triples)
            hd.ftri = nn::HyperHead(ps, base + ".ftri", state_dim, hyper_hidden,
                                    n_agents_ * proxy_pairs_.size(), rng);
        heads_nets_.push_back(std::move(hd));
    }
    if (mode_ == HeadMode::softmax)
        logits_ = nn::HyperHead(ps, name + ".logits", state_dim, hyper_hidden, heads_, rng);
    if (mode_ == HeadMode::mlp) {
        mlp1_ = nn::Linear(ps, name + ".mlp1", heads_, heads_, rng);
        mlp2_ = nn::Linear(ps, name + ".mlp2", heads_, 1, rng);
    }
}

Var PracticalMvdMixer::head_value(Tape* t, std::size_t h, const MixerBatch& in,
                                  const Var& qm, const Var& s) const {
    const Head& hd = heads_nets_[h];
    const std::size_t n = n_agents_;

    Var out = hd.f0.forward(t, s);
    Var wi = abs_op(t, hd.fi.forward(t, s));
    out = add(t, out, row_sum(t, mul(t, wi, qm)));

    const bool with_pairs = order_ >= 2 && n_slots_ == 2 * n;
    if (!with_pairs) return out;

    const std::size_t rows = qm->value.shape()[0];
    Var qd = slice_cols(t, qm, 0, n);
    Var qp = slice_cols(t, qm, n, 2 * n);
    // shift makes observed proxy utilities nonnegative; halve per the
    // practical form, then re-zero masked proxies
    Var qp_sh = mul_const(t, scale(t, add_scalar(t, qp, in.qmin_offset), 0.5), in.proxy_mask);

    Tensor pair_mask({rows, n * n});
    for (std::size_t b = 0; b < rows; ++b)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                pair_mask[b * n * n + i * n + j] =
                    in.deciding_mask[b * n + i] * in.proxy_mask[b * n + j];
    Var wp = mul_const(t, abs_op(t, hd.fpair.forward(t, s)), pair_mask);
    out = add(t, out, bilinear_pairs(t, wp, qd, qp_sh));

    if (order_ >= 3 && !proxy_pairs_.empty()) {
        std::vector<Var> combos;
        combos.reserve(proxy_pairs_.size());
        for (const auto& [j, k] : proxy_pairs_) {
            combos.push_back(mul(t,
                                 slice_cols(t, qp_sh, static_cast<std::size_t>(j),
                                            static_cast<std::size_t>(j) + 1),
                                 slice_cols(t, qp_sh, static_cast<std::size_t>(k),
                                            static_cast<std::size_t>(k) + 1)));
        }
        Var pcomb = concat_cols(t, combos);
        const std::size_t c = proxy_pairs_.size();
        Tensor tri_mask({rows, n * c});
        for (std::size_t b = 0; b < rows; ++b)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t q = 0; q < c; ++q) {
                    const auto& [j, k] = proxy_pairs_[q];
                    tri_mask[b * n * c + i * c + q] =
                        in.deciding_mask[b * n + i] *
                        in.proxy_mask[b * n + static_cast<std::size_t>(j)] *
                        in.proxy_mask[b * n + static_cast<std::size_t>(k)];
                }
        Var wt = mul_const(t, abs_op(t, hd.ftri.forward(t, s)), tri_mask);
        out = add(t, out, bilinear_pairs(t, wt, qd, pcomb));
    }
    return out;
}

Var PracticalMvdMixer::forward(Tape* t, const MixerBatch& in) {
    Var qm = mul_const(t, in.utilities, in.util_mask);
    const Var& s = in.state;

    if (mode_ == HeadMode::direct) return head_value(t, 0, in, qm, s);

    std::vector<Var> head_vals;
    head_vals.reserve(heads_);
    for (std::size_t h = 0; h < heads_; ++h) head_vals.push_back(head_value(t, h, in, qm, s));
    Var heads = concat_cols(t, head_vals);

    if (mode_ == HeadMode::softmax) {
        Var w = softmax_rows(t, logits_.forward(t, s));
        return row_sum(t, mul(t, w, heads));
    }
    // mlp: rectified perceptron with absolute-valued weights keeps the
    // composition monotone in every head; the mean-of-heads skip keeps it
    // strictly increasing even when every hidden unit is dead
    Var hidden = relu(t, add_rowvec(t, matmul(t, heads, abs_op(t, mlp1_.w)), mlp1_.b));
    Var out = add_rowvec(t, matmul(t, hidden, abs_op(t, mlp2_.w)), mlp2_.b);
    return add(t, out, scale(t, row_sum(t, heads), 1.0 / static_cast<double>(heads_)));
}

MixWeights PracticalMvdMixer::weights(const MixerBatch& in) const {
    const std::size_t rows = in.utilities->value.shape()[0];
    const std::size_t n = n_agents_;
    MixWeights w;
    w.slot = Tensor({rows, n_slots_});
    w.pair = Tensor({rows, n * n});
    const bool with_pairs = order_ >= 2 && n_slots_ == 2 * n;
    for (std::size_t h = 0; h < heads_; ++h) {
        Var wi = abs_op(nullptr, heads_nets_[h].fi.forward(nullptr, in.state));
        for (std::size_t i = 0; i < w.slot.numel(); ++i) w.slot[i] += wi->value[i];
        if (with_pairs) {
            Var wp = abs_op(nullptr, heads_nets_[h].fpair.forward(nullptr, in.state));
            for (std::size_t b = 0; b < rows; ++b)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const std::size_t o = b * n * n + i * n + j;
                        w.pair[o] += wp->value[o] * in.deciding_mask[b * n + i] *
                                     in.proxy_mask[b * n + j];
                    }
        }
    }
    const double inv = 1.0 / static_cast<double>(heads_);
    for (std::size_t i = 0; i < w.slot.numel(); ++i) w.slot[i] *= inv;
    for (std::size_t i = 0; i < w.pair.numel(); ++i) w.pair[i] *= inv;
    return w;
}

}  // namespace ac::mix
