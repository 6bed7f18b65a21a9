#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ac/core/rng.hpp"
#include "ac/nn/adam.hpp"
#include "ac/nn/checkpoint.hpp"
#include "ac/nn/layers.hpp"
#include "support/gradcheck.hpp"

using namespace ac;
using grad::Tape;
using grad::Var;

TEST_CASE("gru: zero weights leave only the head bias") {
    Rng rng(1);
    nn::ParamSet ps;
    nn::GruAgentNet net(ps, "agent", 5, 8, 4, rng);
    for (auto& [name, var] : ps.items()) var->value.fill(0.0);
    net.head.b->value = Tensor({4}, {1.0, -2.0, 0.5, 3.0});

    Var x = grad::make_var(Tensor({1, 5}, {1, 2, 3, 4, 5}));
    Var h = grad::make_var(Tensor({1, 8}));
    auto [q, h2] = net.forward(nullptr, x, h);
    CHECK(q->value.vec() == std::vector<double>{1.0, -2.0, 0.5, 3.0});
}

TEST_CASE("gru: zero update gate hands the state to the candidate") {
    Rng rng(2);
    nn::ParamSet ps;
    const std::size_t in = 3, H = 4;
    nn::GruCell cell(ps, "gru", in, H, rng);
    // force z = sigmoid(large negative) ~ 0 via the z-gate biases
    for (std::size_t j = H; j < 2 * H; ++j) {
        cell.bx->value[j] = -40.0;
        cell.bh->value[j] = -40.0;
    }
    Tensor xv({1, in}, {0.3, -0.2, 0.9});
    Tensor hv({1, H}, {0.5, -0.5, 0.25, -0.25});
    Var h2 = cell.forward(nullptr, grad::make_var(xv), grad::make_var(hv));

    // hand evaluation: r gate, then the candidate only
    auto dot_col = [&](const Tensor& w, const Tensor& b, const Tensor& v, std::size_t col,
                       std::size_t off) {
        double acc = b[off + col];
        for (std::size_t i = 0; i < v.numel(); ++i) acc += v[i] * w.at(i, off + col);
        return acc;
    };
    for (std::size_t j = 0; j < H; ++j) {
        const double r = 1.0 / (1.0 + std::exp(-(dot_col(cell.wx->value, cell.bx->value, xv, j, 0) +
                                                 dot_col(cell.wh->value, cell.bh->value, hv, j, 0))));
        const double cand = std::tanh(dot_col(cell.wx->value, cell.bx->value, xv, j, 2 * H) +
                                      r * dot_col(cell.wh->value, cell.bh->value, hv, j, 2 * H));
        CHECK(h2->value[j] == doctest::Approx(cand).epsilon(1e-9));
    }
}

TEST_CASE("gru agent net: hidden norm stays finite, gradients check out") {
    Rng rng(3);
    nn::ParamSet ps;
    nn::GruAgentNet net(ps, "agent", 6, 8, 3, rng);

    // bounded inputs for many steps keep the hidden state bounded
    Var h = grad::make_var(Tensor({1, 8}));
    for (int t = 0; t < 200; ++t) {
        Tensor xv({1, 6});
        for (auto& v : xv.vec()) v = rng.uniform(-1.0, 1.0);
        auto [q, h2] = net.forward(nullptr, grad::make_var(xv), h);
        h = h2;
    }
    double norm = 0.0;
    for (double v : h->value.vec()) norm += v * v;
    CHECK(std::isfinite(norm));
    CHECK(norm < 8.0 + 1e-9);  // every component of a GRU state lies in (-1, 1)

    // finite-difference check through a 3-step unroll
    std::vector<Var> leaves;
    for (auto& [name, var] : ps.items()) leaves.push_back(var);
    std::vector<Tensor> xs;
    for (int t = 0; t < 3; ++t) {
        Tensor xv({2, 6});
        for (auto& v : xv.vec()) v = rng.normal();
        xs.push_back(xv);
    }
    auto forward = [&](Tape* t) -> Var {
        Var hh = grad::make_var(Tensor({2, 8}));
        Var total;
        for (int step = 0; step < 3; ++step) {
            auto [q, h2] = net.forward(t, grad::make_var(xs[static_cast<std::size_t>(step)]), hh);
            hh = h2;
            Var part = grad::sum(t, q);
            total = total ? grad::add(t, total, part) : part;
        }
        return total;
    };
    auto res = actest::grad_check(forward, leaves);
    CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("adam: fresh optimizer with zero gradient leaves parameters alone") {
    Rng rng(4);
    nn::ParamSet ps;
    Var w = ps.add("w", Tensor({3}, {1.0, 2.0, 3.0}));
    nn::Adam opt(ps);
    grad::ensure_grad(w);  // zeros
    opt.step();
    CHECK(w->value.vec() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("adam: constant gradient step size approaches lr * sign(g)") {
    nn::ParamSet ps;
    Var w = ps.add("w", Tensor({2}, {0.0, 0.0}));
    nn::AdamConfig cfg;
    cfg.lr = 0.01;
    nn::Adam opt(ps, cfg);
    double prev0 = 0.0, prev1 = 0.0, step0 = 0.0, step1 = 0.0;
    for (int i = 0; i < 400; ++i) {
        grad::ensure_grad(w);
        w->grad[0] = 3.7;   // positive constant gradient
        w->grad[1] = -0.2;  // negative constant gradient
        prev0 = w->value[0];
        prev1 = w->value[1];
        opt.step();
        step0 = w->value[0] - prev0;
        step1 = w->value[1] - prev1;
    }
    // closed-form Adam fixed point: update -> lr * sign(g)
    CHECK(step0 == doctest::Approx(-0.01).epsilon(1e-4));
    CHECK(step1 == doctest::Approx(0.01).epsilon(1e-4));
}

TEST_CASE("adam: paper default learning rate") {
    nn::AdamConfig cfg;
    CHECK(cfg.lr == 0.0005);
}

TEST_CASE("adam: non-finite gradient aborts with the parameter name") {
    nn::ParamSet ps;
    Var w = ps.add("w.bad", Tensor({1}, {0.0}));
    nn::Adam opt(ps);
    grad::ensure_grad(w);
    w->grad[0] = std::nan("");
    CHECK_THROWS_WITH_AS(opt.step(), doctest::Contains("w.bad"), std::runtime_error);
}

TEST_CASE("checkpoint: little-endian container with json header round-trips") {
    Rng rng(5);
    nn::ParamSet ps;
    nn::GruAgentNet net(ps, "agent", 4, 6, 3, rng);
    const std::string path = "/tmp/ac_test_checkpoint.bin";
    nn::save_checkpoint(path, ps);

    Rng rng2(77);
    nn::ParamSet ps2;
    nn::GruAgentNet net2(ps2, "agent", 4, 6, 3, rng2);
    CHECK_FALSE(ps2.values_equal(ps));
    nn::load_checkpoint(path, ps2);
    CHECK(ps2.values_equal(ps));

    // header sanity: u64 length then json
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f);
    unsigned char len_le[8];
    REQUIRE(std::fread(len_le, 1, 8, f) == 8);
    std::uint64_t hlen = 0;
    for (int i = 0; i < 8; ++i) hlen |= static_cast<std::uint64_t>(len_le[i]) << (8 * i);
    std::string header(hlen, '\0');
    REQUIRE(std::fread(header.data(), 1, hlen, f) == hlen);
    std::fclose(f);
    CHECK(header.find("\"arrays\"") != std::string::npos);
    CHECK(header.find("\"offset\"") != std::string::npos);
    CHECK(header.find("agent.gru.wx") != std::string::npos);
}

TEST_CASE("checkpoint: shape mismatch is rejected") {
    Rng rng(6);
    nn::ParamSet ps;
    ps.add("w", Tensor({2, 2}));
    const std::string path = "/tmp/ac_test_checkpoint2.bin";
    nn::save_checkpoint(path, ps);
    nn::ParamSet other;
    other.add("w", Tensor({3}));
    CHECK_THROWS(nn::load_checkpoint(path, other));
}

TEST_CASE("softmax head weights stay a distribution under extreme logits") {
    Tensor logits({1, 4}, {700.0, -700.0, 0.0, 699.0});
    Var s = grad::softmax_rows(nullptr, grad::make_var(logits));
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s->value[i] >= 0.0);
        total += s->value[i];
    }
    CHECK(std::fabs(total - 1.0) < 1e-12);
}
