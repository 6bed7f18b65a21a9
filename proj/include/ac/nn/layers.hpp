#pragma once

#include <string>

#include "ac/grad/ops.hpp"
#include "ac/nn/params.hpp"

namespace ac::nn {

struct Linear {
    grad::Var w, b;
    std::size_t in = 0, out = 0;

    Linear() = default;
    Linear(ParamSet& ps, const std::string& name, std::size_t in_dim, std::size_t out_dim,
           Rng& rng)
        : in(in_dim), out(out_dim) {
        w = ps.add(name + ".w", uniform_init(rng, {in_dim, out_dim}, in_dim));
        b = ps.add(name + ".b", uniform_init(rng, {out_dim}, in_dim));
    }

    grad::Var forward(grad::Tape* t, const grad::Var& x) const {
        return grad::linear(t, x, w, b);
    }
};

/// Gated recurrent cell, gate order (r, z, n):
///   r = sigmoid(gi_r + gh_r)
///   z = sigmoid(gi_z + gh_z)
///   n = tanh(gi_n + r * gh_n)
///   h' = (1 - z) * n + z * h
/// so a zero update gate hands the new hidden state entirely to the
/// candidate n.
struct GruCell {
    grad::Var wx, wh, bx, bh;
    std::size_t in = 0, hidden = 0;

    GruCell() = default;
    GruCell(ParamSet& ps, const std::string& name, std::size_t in_dim, std::size_t hidden_dim,
            Rng& rng)
        : in(in_dim), hidden(hidden_dim) {
        wx = ps.add(name + ".wx", uniform_init(rng, {in_dim, 3 * hidden_dim}, hidden_dim));
        wh = ps.add(name + ".wh", uniform_init(rng, {hidden_dim, 3 * hidden_dim}, hidden_dim));
        bx = ps.add(name + ".bx", uniform_init(rng, {3 * hidden_dim}, hidden_dim));
        bh = ps.add(name + ".bh", uniform_init(rng, {3 * hidden_dim}, hidden_dim));
    }

    grad::Var forward(grad::Tape* t, const grad::Var& x, const grad::Var& h) const {
        return grad::gru_cell(t, x, h, wx, wh, bx, bh);
    }
};

/// Recurrent utility network shared by every slot: fc -> ReLU -> GRU -> head.
/// Input rows are [obs ; prev-action one-hot ; agent-id one-hot]; the head
/// emits one utility per action id (the env's actions plus the blank
/// sentinel).
struct GruAgentNet {
    Linear fc_in;
    GruCell gru;
    Linear head;
    std::size_t input_dim = 0, hidden_dim = 0, action_count = 0;

    GruAgentNet() = default;
    GruAgentNet(ParamSet& ps, const std::string& name, std::size_t in_dim,
                std::size_t hidden, std::size_t actions, Rng& rng)
        : fc_in(ps, name + ".fc_in", in_dim, hidden, rng),
          gru(ps, name + ".gru", hidden, hidden, rng),
          head(ps, name + ".head", hidden, actions, rng),
          input_dim(in_dim),
          hidden_dim(hidden),
          action_count(actions) {}

    /// (input[B,in], h[B,H]) -> (q[B,actions], h'[B,H])
    std::pair<grad::Var, grad::Var> forward(grad::Tape* t, const grad::Var& x,
                                            const grad::Var& h) const {
        grad::Var e = grad::relu(t, fc_in.forward(t, x));
        grad::Var h2 = gru.forward(t, e, h);
        return {head.forward(t, h2), h2};
    }
};

/// Two-layer perceptron head of a hypernetwork: state -> hidden -> weights
/// for one mixer weight group.
struct HyperHead {
    Linear l1, l2;

    HyperHead() = default;
    HyperHead(ParamSet& ps, const std::string& name, std::size_t state_dim,
              std::size_t hidden, std::size_t out_dim, Rng& rng)
        : l1(ps, name + ".l1", state_dim, hidden, rng),
          l2(ps, name + ".l2", hidden, out_dim, rng) {}

    grad::Var forward(grad::Tape* t, const grad::Var& s) const {
        return l2.forward(t, grad::relu(t, l1.forward(t, s)));
    }
};

}  // namespace ac::nn
