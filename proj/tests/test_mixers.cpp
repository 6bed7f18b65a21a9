#include <doctest.h>

#include <cmath>
#include <cstring>

#include "ac/core/rng.hpp"
#include "ac/mix/igm.hpp"
#include "ac/mix/mixer.hpp"
#include "ac/mix/qmin.hpp"
#include "ac/mix/raw.hpp"
#include "support/gradcheck.hpp"

using namespace ac;
using namespace ac::mix;
using grad::Tape;
using grad::Var;

namespace {

/// Random slot context over n real + n proxy slots, guaranteeing the mask
/// structure of the wrapper: proxy j unmasked iff real j executing.
SlotContext random_context(Rng& rng, std::size_t n) {
    SlotContext ctx;
    ctx.active.assign(2 * n, 0);
    ctx.deciding.assign(2 * n, 0);
    ctx.proxy_unmasked.assign(2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool deciding = rng.uniform() < 0.5;
        ctx.active[i] = 1;
        ctx.deciding[i] = deciding;
        if (!deciding) {
            ctx.active[n + i] = 1;
            ctx.proxy_unmasked[n + i] = 1;
        }
    }
    return ctx;
}

RawMvdParams random_params(Rng& rng, std::size_t n, int max_order) {
    RawMvdParams p;
    p.k0 = rng.normal();
    p.k.resize(2 * n);
    for (auto& k : p.k) k = rng.normal();
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t j = 0; j < n; ++j) {
            p.terms.push_back({static_cast<int>(d),
                               {static_cast<int>(n + j)},
                               rng.normal()});
        }
        if (max_order >= 3) {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k2 = j + 1; k2 < n; ++k2)
                    p.terms.push_back({static_cast<int>(d),
                                       {static_cast<int>(n + j), static_cast<int>(n + k2)},
                                       rng.normal()});
        }
    }
    return p;
}

std::vector<double> random_utilities(Rng& rng, std::size_t s) {
    std::vector<double> u(s);
    for (auto& x : u) x = rng.normal();
    return u;
}

/// Single-sample batch for the hypernet mixers.
struct OneSample {
    MixerBatch batch;
    Var utilities;
};

OneSample make_batch(Rng& rng, std::size_t n, std::size_t state_dim, const SlotContext& ctx,
                     double offset = 0.0) {
    OneSample out;
    const std::size_t s = 2 * n;
    Tensor u({1, s});
    for (auto& x : u.vec()) x = rng.normal();
    out.utilities = grad::make_param(u);
    Tensor st({1, state_dim});
    for (auto& x : st.vec()) x = rng.normal();
    out.batch.utilities = out.utilities;
    out.batch.state = grad::constant(st);
    out.batch.util_mask = Tensor({1, s});
    out.batch.deciding_mask = Tensor({1, n});
    out.batch.proxy_mask = Tensor({1, n});
    for (std::size_t i = 0; i < s; ++i) out.batch.util_mask[i] = ctx.active[i] ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.batch.deciding_mask[i] = ctx.deciding[i] ? 1.0 : 0.0;
        out.batch.proxy_mask[i] = ctx.proxy_unmasked[n + i] ? 1.0 : 0.0;
    }
    out.batch.n_agents = n;
    out.batch.n_slots = s;
    out.batch.qmin_offset = offset;
    return out;
}

}  // namespace

TEST_CASE("mix_additive: unit weights sum, constant bias, exact gradient") {
    std::vector<double> q = {2.0, 3.0};
    std::vector<char> active = {1, 1};
    std::vector<double> ones = {1.0, 1.0};
    CHECK(mix_additive(q, active, 0.0, ones) == 5.0);
    std::vector<double> zeros = {0.0, 0.0};
    CHECK(mix_additive(q, active, 1.0, zeros) == 1.0);

    // dQtot/dQi == k_i exactly, via the taped form of the same formula
    RawMvdParams p;
    p.k0 = 0.3;
    p.k = {1.7, -2.5};
    SlotContext ctx{{1, 1}, {1, 1}, {0, 0}};
    Tape t;
    Var u = grad::make_param(Tensor({1, 2}, {2.0, 3.0}));
    Var qt = raw_mvd_graph(&t, u, ctx, p, 1, 2);
    t.backward(qt);
    CHECK(u->grad[0] == 1.7);
    CHECK(u->grad[1] == -2.5);
}

TEST_CASE("raw mvd: zero pair weights reduce to additive, exactly") {
    Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(2);
        SlotContext ctx = random_context(rng, n);
        RawMvdParams p = random_params(rng, n, 2);
        auto u = random_utilities(rng, 2 * n);
        RawMvdParams p_zero = p;
        for (auto& term : p_zero.terms) term.coeff = 0.0;
        const double add = mix_additive(u, ctx.active, p.k0, p.k);
        CHECK(mix_mvd(u, ctx, p_zero, n) == add);
        // order-1 evaluation ignores every interaction term
        CHECK(mix_mvd_korder(u, ctx, p, 1, n) == add);
        // order-2 evaluation is the pairwise formula by definition
        CHECK(mix_mvd_korder(u, ctx, p, 2, n) == mix_mvd(u, ctx, p, n));
    }
}

TEST_CASE("raw mvd: single product term") {
    SlotContext ctx{{0, 1, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    RawMvdParams p;
    p.k0 = 0.0;
    p.k = {0, 0, 0, 0};
    p.terms = {{1, {3}, 1.0}};
    std::vector<double> u = {0.0, 2.0, 0.0, 3.0};
    CHECK(mix_mvd(u, ctx, p, 2) == 6.0);
}

TEST_CASE("raw mvd K=3: triple term is the product plus lower orders") {
    // slots: 3 real + 3 proxy; decider 0, proxies 4 and 5 unmasked
    SlotContext ctx{{1, 0, 0, 0, 1, 1}, {1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 1}};
    RawMvdParams p;
    p.k = std::vector<double>(6, 0.0);
    p.terms = {{0, {4, 5}, 1.0}};
    std::vector<double> u = {2.0, 0, 0, 0, 3.0, 4.0};
    CHECK(mix_mvd_korder(u, ctx, p, 3, 3) == 24.0);
    // adding lower-order structure keeps the hand expansion
    p.k0 = 1.0;
    p.k[0] = 0.5;
    p.terms.push_back({0, {4}, 2.0});
    // 1 + 0.5*2 + 2*2*3 + 2*3*4 = 38
    CHECK(mix_mvd_korder(u, ctx, p, 3, 3) == doctest::Approx(38.0));
    // K caps the order: the triple vanishes at K=2
    CHECK(mix_mvd_korder(u, ctx, p, 2, 3) == doctest::Approx(14.0));
}

TEST_CASE("raw mvd: K out of range is a contract error") {
    SlotContext ctx{{1, 1}, {1, 1}, {0, 0}};
    RawMvdParams p;
    p.k = {0.0, 0.0};
    std::vector<double> u = {1.0, 1.0};
    CHECK_THROWS_AS(mix_mvd_korder(u, ctx, p, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(mix_mvd_korder(u, ctx, p, 3, 2), std::invalid_argument);
}

TEST_CASE("mvd gradient structure matches the closed form") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(2);
        SlotContext ctx = random_context(rng, n);
        RawMvdParams p = random_params(rng, n, 2);
        auto uv = random_utilities(rng, 2 * n);

        Tape t;
        Var u = grad::make_param(Tensor({1, 2 * n}, std::vector<double>(uv)));
        Var qt = raw_mvd_graph(&t, u, ctx, p, 2, n);
        t.backward(qt);

        for (std::size_t i = 0; i < 2 * n; ++i) {
            double expect = ctx.active[i] ? p.k[i] : 0.0;
            for (const auto& term : p.terms) {
                if (!ctx.deciding[static_cast<std::size_t>(term.decider)]) continue;
                bool proxies_on = true;
                for (int pr : term.proxies)
                    if (!ctx.proxy_unmasked[static_cast<std::size_t>(pr)]) proxies_on = false;
                if (!proxies_on) continue;
                if (term.decider == static_cast<int>(i)) {
                    double prod = term.coeff;
                    for (int pr : term.proxies) prod *= uv[static_cast<std::size_t>(pr)];
                    expect += prod;
                } else {
                    for (std::size_t pi = 0; pi < term.proxies.size(); ++pi) {
                        if (term.proxies[pi] != static_cast<int>(i)) continue;
                        double prod = term.coeff * uv[static_cast<std::size_t>(term.decider)];
                        for (std::size_t pj = 0; pj < term.proxies.size(); ++pj)
                            if (pj != pi)
                                prod *= uv[static_cast<std::size_t>(term.proxies[pj])];
                        expect += prod;
                    }
                }
            }
            CHECK(u->grad[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotonic mixer: raising any utility never lowers the total") {
    Rng rng(6);
    const std::size_t n = 3, s = 6, state_dim = 8;
    nn::ParamSet ps;
    MonotonicMixer mixer(ps, "qmix", state_dim, s, 16, 24, rng);
    SlotContext all_on;
    all_on.active.assign(s, 1);
    all_on.deciding.assign(s, 1);
    all_on.proxy_unmasked.assign(s, 0);

    int probes = 0;
    while (probes < 1000) {
        auto sample = make_batch(rng, n, state_dim, all_on);
        const double base = mixer.forward(nullptr, sample.batch)->value.item();
        const std::size_t i = rng.below(s);
        sample.utilities->value[i] += 0.25 + rng.uniform();
        const double bumped = mixer.forward(nullptr, sample.batch)->value.item();
        CHECK(bumped >= base - 1e-12);
        ++probes;
    }
}

TEST_CASE("monotonic mixer: zero hypernet gives the value bias; grads check out") {
    Rng rng(7);
    nn::ParamSet ps;
    MonotonicMixer mixer(ps, "qmix", 4, 4, 8, 8, rng);
    for (auto& [name, var] : ps.items()) var->value.fill(0.0);
    ps.find("qmix.hv.l2.b")->value[0] = 2.75;
    SlotContext ctx{{1, 1, 1, 1}, {1, 1, 1, 1}, {0, 0, 0, 0}};
    auto sample = make_batch(rng, 2, 4, ctx);
    CHECK(mixer.forward(nullptr, sample.batch)->value.item() == 2.75);

    // analytic gradients of all parameters against finite differences
    for (auto& [name, var] : ps.items())
        for (auto& x : var->value.vec()) x = 0.3 * rng.normal();
    std::vector<grad::Var> leaves;
    for (auto& [name, var] : ps.items()) leaves.push_back(var);
    auto sample2 = make_batch(rng, 2, 4, ctx);
    leaves.push_back(sample2.utilities);
    auto res = actest::grad_check(
        [&](Tape* t) { return mixer.forward(t, sample2.batch); }, leaves);
    CHECK(res.max_rel_err < 1e-4);

    // and gradient signs w.r.t. utilities are nonnegative
    grad::zero_grad(sample2.utilities);
    Tape t;
    t.backward(mixer.forward(&t, sample2.batch));
    for (std::size_t i = 0; i < 4; ++i) CHECK(sample2.utilities->grad[i] >= 0.0);
}

TEST_CASE("qmin tracker: offset covers every observed proxy utility") {
    QminTracker tracker;
    tracker.update(std::vector<double>{0.5, 3.0});
    CHECK(tracker.offset() == 0.0);  // nonnegative observations keep offset 0
    tracker.update(-2.0);
    CHECK(-2.0 + tracker.offset() >= 0.0);
    CHECK(tracker.offset() == 2.0);
    double last = tracker.offset();
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        tracker.update(rng.normal() * 3.0);
        CHECK(tracker.offset() >= last);  // monotone magnitude
        last = tracker.offset();
        CHECK(tracker.running_min() + tracker.offset() == 0.0);
    }
}

TEST_CASE("practical mixer: zero hypernet leaves only the f0 bias") {
    Rng rng(9);
    nn::ParamSet ps;
    PracticalMvdMixer mixer(ps, "mvd", 4, 2, 4, 2, HeadMode::direct, 1, 8, rng);
    for (auto& [name, var] : ps.items()) var->value.fill(0.0);
    ps.find("mvd.head0.f0.l2.b")->value[0] = -1.5;
    SlotContext ctx{{1, 0, 0, 1}, {1, 0, 0, 0}, {0, 0, 0, 1}};
    auto sample = make_batch(rng, 2, 4, ctx, 0.7);
    CHECK(mixer.forward(nullptr, sample.batch)->value.item() == -1.5);
}

TEST_CASE("practical mixer: softmax with one head equals direct") {
    Rng rng(10);
    nn::ParamSet ps_soft, ps_dir;
    PracticalMvdMixer soft(ps_soft, "m", 6, 2, 4, 2, HeadMode::softmax, 1, 8, rng);
    Rng rng2(11);
    PracticalMvdMixer dir(ps_dir, "m", 6, 2, 4, 2, HeadMode::direct, 1, 8, rng2);
    // align the shared head parameters (the softmax set has logits extras)
    for (std::size_t i = 0; i < ps_dir.items().size(); ++i) {
        REQUIRE(ps_soft.items()[i].first == ps_dir.items()[i].first);
        ps_dir.items()[i].second->value = ps_soft.items()[i].second->value;
    }
    for (int trial = 0; trial < 50; ++trial) {
        SlotContext ctx = random_context(rng, 2);
        auto sample = make_batch(rng, 2, 6, ctx, 0.4);
        const double a = soft.forward(nullptr, sample.batch)->value.item();
        const double b = dir.forward(nullptr, sample.batch)->value.item();
        CHECK(a == doctest::Approx(b).epsilon(1e-15));
    }
}

TEST_CASE("practical mixer: effective deciding coefficient is the shifted form") {
    Rng rng(12);
    const std::size_t n = 3, s = 6, state_dim = 10;
    nn::ParamSet ps;
    PracticalMvdMixer mixer(ps, "mvd", state_dim, n, s, 2, HeadMode::direct, 1, 16, rng);
    for (int trial = 0; trial < 100; ++trial) {
        SlotContext ctx = random_context(rng, n);
        const double offset = rng.uniform(0.0, 2.0);
        auto sample = make_batch(rng, n, state_dim, ctx, offset);
        // raise proxies by the offset so shifted values stay nonnegative, as
        // the tracker guarantees in training
        for (std::size_t j = 0; j < n; ++j)
            if (ctx.proxy_unmasked[n + j] && sample.utilities->value[n + j] < -offset)
                sample.utilities->value[n + j] = -offset + rng.uniform();

        Tape t;
        grad::zero_grad(sample.utilities);
        t.backward(mixer.forward(&t, sample.batch));

        const MixWeights w = mixer.weights(sample.batch);
        for (std::size_t i = 0; i < n; ++i) {
            if (!ctx.deciding[i]) continue;
            double expect = w.slot[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (!ctx.proxy_unmasked[n + j]) continue;
                const double qj = sample.utilities->value[n + j];
                expect += w.pair[i * n + j] * (qj + offset) / 2.0;
            }
            CHECK(expect >= 0.0);
            CHECK(sample.utilities->grad[i] == doctest::Approx(expect).epsilon(1e-9));
            CHECK(sample.utilities->grad[i] >= 0.0);
        }
    }
}

TEST_CASE("practical mixer: masked utilities cannot influence the output") {
    Rng rng(13);
    const std::size_t n = 3;
    for (auto mode : {HeadMode::direct, HeadMode::softmax, HeadMode::mlp}) {
        nn::ParamSet ps;
        PracticalMvdMixer mixer(ps, "mvd", 8, n, 2 * n, 2, mode, 3, 12, rng);
        SlotContext ctx = random_context(rng, n);
        auto sample = make_batch(rng, n, 8, ctx, 0.5);
        const double base = mixer.forward(nullptr, sample.batch)->value.item();
        bool touched = false;
        for (std::size_t i = 0; i < 2 * n; ++i) {
            if (ctx.active[i]) continue;
            sample.utilities->value[i] += 1000.0 * (rng.uniform() - 0.5);
            touched = true;
        }
        if (!touched) continue;
        const double after = mixer.forward(nullptr, sample.batch)->value.item();
        CHECK(std::memcmp(&base, &after, sizeof(double)) == 0);  // bit-identical
    }
}

TEST_CASE("check_igm: positive additive weights always satisfy IGM") {
    Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t slots = 2 + rng.below(3);
        IgmInstance inst;
        std::vector<double> k(slots);
        for (auto& x : k) x = 0.1 + rng.uniform();
        for (std::size_t i = 0; i < slots; ++i) {
            std::vector<double> row(2 + rng.below(4));
            for (auto& q : row) q = rng.normal();
            inst.utility.push_back(row);
            inst.deciding.push_back(1);
            inst.frozen_action.push_back(0);
        }
        auto verdict = check_igm(
            [&](const std::vector<double>& q) {
                double total = 0.0;
                for (std::size_t i = 0; i < slots; ++i) total += k[i] * q[i];
                return total;
            },
            inst);
        CHECK(verdict.holds);
    }
}

TEST_CASE("check_igm: a negative raw pair weight can break IGM") {
    // one decider, one unmasked proxy frozen at a positive utility
    IgmInstance inst;
    inst.utility = {{0.0, 1.0}, {2.0, 9.0}};
    inst.deciding = {1, 0};
    inst.frozen_action = {0, 0};  // proxy runs action 0 with utility 2
    auto verdict = check_igm(
        [](const std::vector<double>& q) { return -1.0 * q[0] * q[1]; }, inst);
    CHECK_FALSE(verdict.holds);
}

TEST_CASE("check_igm: budget refusal") {
    IgmInstance inst;
    for (int i = 0; i < 8; ++i) {
        inst.utility.push_back(std::vector<double>(10, 0.0));
        inst.deciding.push_back(1);
        inst.frozen_action.push_back(0);
    }
    CHECK_THROWS(check_igm([](const std::vector<double>&) { return 0.0; }, inst, 1000));
}

TEST_CASE("practical mixer satisfies IGM on random draws, all head modes") {
    Rng rng(15);
    const std::size_t n = 3, state_dim = 8;
    for (auto mode : {HeadMode::direct, HeadMode::softmax, HeadMode::mlp}) {
        nn::ParamSet ps;
        PracticalMvdMixer mixer(ps, "mvd", state_dim, n, 2 * n, 2, mode, 4, 12, rng);
        int checked = 0;
        for (int trial = 0; trial < 200; ++trial) {
            SlotContext ctx = random_context(rng, n);
            bool any_decider = false;
            for (std::size_t i = 0; i < n; ++i) any_decider |= ctx.deciding[i] != 0;
            if (!any_decider) continue;

            // per-slot utility tables; the tracker has seen these proxies
            const std::size_t actions = 4;
            IgmInstance inst;
            QminTracker tracker;
            for (std::size_t i = 0; i < 2 * n; ++i) {
                std::vector<double> row(actions);
                for (auto& q : row) q = 2.0 * rng.normal();
                if (i >= n && ctx.proxy_unmasked[i]) tracker.update(row);
                inst.utility.push_back(row);
                inst.deciding.push_back(i < n ? ctx.deciding[i] : 0);
                inst.frozen_action.push_back(static_cast<int>(rng.below(actions)));
            }
            Tensor st({1, state_dim});
            for (auto& x : st.vec()) x = rng.normal();

            MixerBatch mb;
            mb.state = grad::constant(st);
            mb.util_mask = Tensor({1, 2 * n});
            mb.deciding_mask = Tensor({1, n});
            mb.proxy_mask = Tensor({1, n});
            for (std::size_t i = 0; i < 2 * n; ++i)
                mb.util_mask[i] = ctx.active[i] ? 1.0 : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                mb.deciding_mask[i] = ctx.deciding[i] ? 1.0 : 0.0;
                mb.proxy_mask[i] = ctx.proxy_unmasked[n + i] ? 1.0 : 0.0;
            }
            mb.n_agents = n;
            mb.n_slots = 2 * n;
            mb.qmin_offset = tracker.offset();

            auto verdict = check_igm(
                [&](const std::vector<double>& chosen) {
                    Tensor u({1, 2 * n}, std::vector<double>(chosen));
                    mb.utilities = grad::make_var(u);
                    return mixer.forward(nullptr, mb)->value.item();
                },
                inst);
            CHECK(verdict.holds);
            ++checked;
        }
        CHECK(checked > 100);
    }
}
