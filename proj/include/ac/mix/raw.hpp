#pragma once

#include <span>
#include <vector>

#include "ac/grad/ops.hpp"

namespace ac::mix {

/// Slot context for the raw closed-form mixers: which slots contribute at
/// all, which real slots are deciding, which proxy slots are unmasked.
struct SlotContext {
    std::vector<char> active;          // per slot
    std::vector<char> deciding;        // per slot (real slots)
    std::vector<char> proxy_unmasked;  // per slot (proxy slots)
};

/// One interaction term of order proxies.size()+1: coeff * Q_decider *
/// prod Q_proxy. Counted only when the decider is deciding and every listed
/// proxy is unmasked.
struct RawTerm {
    int decider = 0;
    std::vector<int> proxies;
    double coeff = 0.0;
};

struct RawMvdParams {
    double k0 = 0.0;
    std::vector<double> k;  // per slot
    std::vector<RawTerm> terms;
};

/// k0 + sum_i k_i Q_i over active slots.
double mix_additive(std::span<const double> utilities, std::span<const char> active,
                    double k0, std::span<const double> k);

/// The signed interaction form up to order K (K=1 additive, K=2 pairwise).
/// K outside [1, n_agents] is a contract error.
double mix_mvd_korder(std::span<const double> utilities, const SlotContext& ctx,
                      const RawMvdParams& params, int K, std::size_t n_agents);

inline double mix_mvd(std::span<const double> utilities, const SlotContext& ctx,
                      const RawMvdParams& params, std::size_t n_agents) {
    return mix_mvd_korder(utilities, ctx, params, 2, n_agents);
}

/// Same formula assembled on the tape from a [1,S] utilities row, for
/// verifying the analytic gradient structure against autodiff.
grad::Var raw_mvd_graph(grad::Tape* t, const grad::Var& utilities, const SlotContext& ctx,
                        const RawMvdParams& params, int K, std::size_t n_agents);

}  // namespace ac::mix
