#include "ac/mix/raw.hpp"

#include <stdexcept>

namespace ac::mix {
namespace {

bool term_live(const RawTerm& term, const SlotContext& ctx, int K) {
    if (static_cast<int>(term.proxies.size()) + 1 > K) return false;
    if (!ctx.deciding[static_cast<std::size_t>(term.decider)]) return false;
    for (int p : term.proxies)
        if (!ctx.proxy_unmasked[static_cast<std::size_t>(p)]) return false;
    return true;
}

}  // namespace

double mix_additive(std::span<const double> utilities, std::span<const char> active,
                    double k0, std::span<const double> k) {
    double q = k0;
    for (std::size_t i = 0; i < utilities.size(); ++i)
        if (active[i]) q += k[i] * utilities[i];
    return q;
}

double mix_mvd_korder(std::span<const double> utilities, const SlotContext& ctx,
                      const RawMvdParams& params, int K, std::size_t n_agents) {
    if (K < 1 || static_cast<std::size_t>(K) > n_agents)
        throw std::invalid_argument("mix_mvd_korder: K out of range [1, n]");
    double q = params.k0;
    for (std::size_t i = 0; i < utilities.size(); ++i)
        if (ctx.active[i]) q += params.k[i] * utilities[i];
    for (const RawTerm& term : params.terms) {
        if (!term_live(term, ctx, K)) continue;
        double prod = term.coeff * utilities[static_cast<std::size_t>(term.decider)];
        for (int p : term.proxies) prod *= utilities[static_cast<std::size_t>(p)];
        q += prod;
    }
    return q;
}

grad::Var raw_mvd_graph(grad::Tape* t, const grad::Var& utilities, const SlotContext& ctx,
                        const RawMvdParams& params, int K, std::size_t n_agents) {
    using namespace grad;
    if (K < 1 || static_cast<std::size_t>(K) > n_agents)
        throw std::invalid_argument("raw_mvd_graph: K out of range [1, n]");
    const std::size_t s = utilities->value.shape()[1];

    Tensor kw({1, s});
    for (std::size_t i = 0; i < s; ++i) kw[i] = ctx.active[i] ? params.k[i] : 0.0;
    Var q = add_scalar(t, row_sum(t, mul_const(t, utilities, kw)), params.k0);

    auto col = [&](int i) {
        return slice_cols(t, utilities, static_cast<std::size_t>(i),
                          static_cast<std::size_t>(i) + 1);
    };
    for (const RawTerm& term : params.terms) {
        if (!term_live(term, ctx, K)) continue;
        Var prod = col(term.decider);
        for (int p : term.proxies) prod = mul(t, prod, col(p));
        q = add(t, q, scale(t, prod, term.coeff));
    }
    return q;
}

}  // namespace ac::mix
