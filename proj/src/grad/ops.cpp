#include "ac/grad/ops.hpp"

#include <cmath>
#include <stdexcept>

#include "ac/kern/kernels.hpp"

namespace ac::grad {
namespace {

const kern::Kernels& K() { return kern::active(); }

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool wants(Tape* t, const Var& a) { return t && a->requires_grad; }
bool wants(Tape* t, const Var& a, const Var& b) {
    return t && (a->requires_grad || b->requires_grad);
}

Var out_like(Tensor value, bool recorded) { return make_var(std::move(value), recorded); }

}  // namespace

Var constant(Tensor value) { return make_var(std::move(value), false); }

Var matmul(Tape* t, const Var& a, const Var& b) {
    require(a->value.rank() == 2 && b->value.rank() == 2, "matmul: rank-2 operands required");
    const std::size_t m = a->value.shape()[0], k = a->value.shape()[1];
    require(b->value.shape()[0] == k, "matmul: inner dimensions disagree");
    const std::size_t n = b->value.shape()[1];

    Tensor v({m, n});
    K().matmul(m, k, n, a->value.data(), b->value.data(), v.data());

    const bool rec = wants(t, a, b);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, b, out, m, k, n] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            const double* g = out->grad.data();
            if (a->requires_grad)
                K().matmul_a_bt_acc(m, n, k, g, b->value.data(), ensure_grad(a).data());
            if (b->requires_grad)
                K().matmul_at_b_acc(m, k, n, a->value.data(), g, ensure_grad(b).data());
        });
    }
    return out;
}

Var linear(Tape* t, const Var& x, const Var& w, const Var& bias) {
    require(x->value.rank() == 2 && w->value.rank() == 2, "linear: rank-2 x and w required");
    const std::size_t m = x->value.shape()[0], k = x->value.shape()[1];
    require(w->value.shape()[0] == k, "linear: inner dimensions disagree");
    const std::size_t n = w->value.shape()[1];
    require(bias->value.numel() == n, "linear: bias length mismatch");

    Tensor v({m, n});
    K().matmul(m, k, n, x->value.data(), w->value.data(), v.data());
    for (std::size_t i = 0; i < m; ++i)
        K().axpy(n, 1.0, bias->value.data(), v.data() + i * n);

    const bool rec = t && (x->requires_grad || w->requires_grad || bias->requires_grad);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([x, w, bias, out, m, k, n] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            const double* g = out->grad.data();
            if (x->requires_grad)
                K().matmul_a_bt_acc(m, n, k, g, w->value.data(), ensure_grad(x).data());
            if (w->requires_grad)
                K().matmul_at_b_acc(m, k, n, x->value.data(), g, ensure_grad(w).data());
            if (bias->requires_grad) {
                double* bg = ensure_grad(bias).data();
                for (std::size_t i = 0; i < m; ++i) K().axpy(n, 1.0, g + i * n, bg);
            }
        });
    }
    return out;
}

Var add(Tape* t, const Var& a, const Var& b) {
    require(a->value.same_shape(b->value), "add: shape mismatch");
    Tensor v(a->value.shape());
    K().add(v.numel(), a->value.data(), b->value.data(), v.data());
    const bool rec = wants(t, a, b);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, b, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            const std::size_t n = out->grad.numel();
            if (a->requires_grad) K().axpy(n, 1.0, out->grad.data(), ensure_grad(a).data());
            if (b->requires_grad) K().axpy(n, 1.0, out->grad.data(), ensure_grad(b).data());
        });
    }
    return out;
}

Var sub(Tape* t, const Var& a, const Var& b) {
    require(a->value.same_shape(b->value), "sub: shape mismatch");
    Tensor v(a->value.shape());
    K().sub(v.numel(), a->value.data(), b->value.data(), v.data());
    const bool rec = wants(t, a, b);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, b, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            const std::size_t n = out->grad.numel();
            if (a->requires_grad) K().axpy(n, 1.0, out->grad.data(), ensure_grad(a).data());
            if (b->requires_grad) K().axpy(n, -1.0, out->grad.data(), ensure_grad(b).data());
        });
    }
    return out;
}

Var mul(Tape* t, const Var& a, const Var& b) {
    require(a->value.same_shape(b->value), "mul: shape mismatch");
    Tensor v(a->value.shape());
    K().mul(v.numel(), a->value.data(), b->value.data(), v.data());
    const bool rec = wants(t, a, b);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, b, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            const std::size_t n = out->grad.numel();
            if (a->requires_grad)
                K().mul_acc(n, out->grad.data(), b->value.data(), ensure_grad(a).data());
            if (b->requires_grad)
                K().mul_acc(n, out->grad.data(), a->value.data(), ensure_grad(b).data());
        });
    }
    return out;
}

Var add_rowvec(Tape* t, const Var& m, const Var& v) {
    require(m->value.rank() == 2, "add_rowvec: rank-2 lhs required");
    const std::size_t rows = m->value.shape()[0], cols = m->value.shape()[1];
    require(v->value.numel() == cols, "add_rowvec: vector length mismatch");
    Tensor val = m->value;
    for (std::size_t i = 0; i < rows; ++i)
        K().axpy(cols, 1.0, v->value.data(), val.data() + i * cols);
    const bool rec = wants(t, m, v);
    Var out = out_like(std::move(val), rec);
    if (rec) {
        t->record([m, v, out, rows, cols] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            if (m->requires_grad)
                K().axpy(rows * cols, 1.0, out->grad.data(), ensure_grad(m).data());
            if (v->requires_grad) {
                double* g = ensure_grad(v).data();
                for (std::size_t i = 0; i < rows; ++i)
                    K().axpy(cols, 1.0, out->grad.data() + i * cols, g);
            }
        });
    }
    return out;
}

Var scale(Tape* t, const Var& a, double s) {
    Tensor v = a->value;
    K().scal(v.numel(), s, v.data());
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, s] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            K().axpy(out->grad.numel(), s, out->grad.data(), ensure_grad(a).data());
        });
    }
    return out;
}

Var add_scalar(Tape* t, const Var& a, double c) {
    Tensor v = a->value;
    for (std::size_t i = 0; i < v.numel(); ++i) v[i] += c;
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            K().axpy(out->grad.numel(), 1.0, out->grad.data(), ensure_grad(a).data());
        });
    }
    return out;
}

Var rsub_scalar(Tape* t, const Var& a, double c) {
    Tensor v = a->value;
    for (std::size_t i = 0; i < v.numel(); ++i) v[i] = c - v[i];
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            K().axpy(out->grad.numel(), -1.0, out->grad.data(), ensure_grad(a).data());
        });
    }
    return out;
}

namespace {

template <typename Fwd, typename Bwd>
Var unary(Tape* t, const Var& a, Fwd fwd, Bwd dfd_by_value_and_input) {
    Tensor v = a->value;
    for (std::size_t i = 0; i < v.numel(); ++i) v[i] = fwd(v[i]);
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, dfd_by_value_and_input] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            const std::size_t n = out->grad.numel();
            for (std::size_t i = 0; i < n; ++i)
                g[i] += out->grad[i] * dfd_by_value_and_input(out->value[i], a->value[i]);
        });
    }
    return out;
}

}  // namespace

Var sigmoid(Tape* t, const Var& a) {
    return unary(
        t, a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double y, double) { return y * (1.0 - y); });
}

Var tanh_op(Tape* t, const Var& a) {
    return unary(
        t, a, [](double x) { return std::tanh(x); },
        [](double y, double) { return 1.0 - y * y; });
}

Var relu(Tape* t, const Var& a) {
    return unary(
        t, a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double, double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var elu(Tape* t, const Var& a) {
    return unary(
        t, a, [](double x) { return x > 0.0 ? x : std::expm1(x); },
        [](double y, double x) { return x > 0.0 ? 1.0 : y + 1.0; });
}

Var abs_op(Tape* t, const Var& a) {
    return unary(
        t, a, [](double x) { return std::fabs(x); },
        [](double, double x) { return x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0; });
}

Var softmax_rows(Tape* t, const Var& a) {
    require(a->value.rank() == 2, "softmax_rows: rank-2 input required");
    const std::size_t rows = a->value.shape()[0], cols = a->value.shape()[1];
    Tensor v(a->value.shape());
    for (std::size_t i = 0; i < rows; ++i) {
        const double* in = a->value.data() + i * cols;
        double* o = v.data() + i * cols;
        double mx = in[0];
        for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, in[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            o[j] = std::exp(in[j] - mx);
            z += o[j];
        }
        for (std::size_t j = 0; j < cols; ++j) o[j] /= z;
    }
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, rows, cols] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            for (std::size_t i = 0; i < rows; ++i) {
                const double* s = out->value.data() + i * cols;
                const double* go = out->grad.data() + i * cols;
                const double inner = K().dot(cols, go, s);
                for (std::size_t j = 0; j < cols; ++j)
                    g[i * cols + j] += s[j] * (go[j] - inner);
            }
        });
    }
    return out;
}

Var sum(Tape* t, const Var& a) {
    Tensor v({1}, {K().sum(a->value.numel(), a->value.data())});
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            const double go = out->grad[0];
            for (std::size_t i = 0; i < a->value.numel(); ++i) g[i] += go;
        });
    }
    return out;
}

Var row_sum(Tape* t, const Var& a) {
    require(a->value.rank() == 2, "row_sum: rank-2 input required");
    const std::size_t rows = a->value.shape()[0], cols = a->value.shape()[1];
    Tensor v({rows, 1});
    for (std::size_t i = 0; i < rows; ++i)
        v[i] = K().sum(cols, a->value.data() + i * cols);
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, rows, cols] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            for (std::size_t i = 0; i < rows; ++i) {
                const double go = out->grad[i];
                for (std::size_t j = 0; j < cols; ++j) g[i * cols + j] += go;
            }
        });
    }
    return out;
}

Var concat_cols(Tape* t, const std::vector<Var>& parts) {
    require(!parts.empty(), "concat_cols: no parts");
    const std::size_t rows = parts[0]->value.shape()[0];
    std::size_t total = 0;
    bool rec = false;
    for (const auto& p : parts) {
        require(p->value.rank() == 2 && p->value.shape()[0] == rows,
                "concat_cols: row mismatch");
        total += p->value.shape()[1];
        rec = rec || (t && p->requires_grad);
    }
    Tensor v({rows, total});
    std::size_t off = 0;
    for (const auto& p : parts) {
        const std::size_t c = p->value.shape()[1];
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < c; ++j) v.at(i, off + j) = p->value.at(i, j);
        off += c;
    }
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([parts, out, rows, total] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            std::size_t off = 0;
            for (const auto& p : parts) {
                const std::size_t c = p->value.shape()[1];
                if (p->requires_grad) {
                    double* g = ensure_grad(p).data();
                    for (std::size_t i = 0; i < rows; ++i)
                        for (std::size_t j = 0; j < c; ++j)
                            g[i * c + j] += out->grad[i * total + off + j];
                }
                off += c;
            }
        });
    }
    return out;
}

Var slice_cols(Tape* t, const Var& a, std::size_t from, std::size_t to) {
    require(a->value.rank() == 2, "slice_cols: rank-2 input required");
    const std::size_t rows = a->value.shape()[0], cols = a->value.shape()[1];
    require(from <= to && to <= cols, "slice_cols: bad range");
    const std::size_t width = to - from;
    Tensor v({rows, width});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < width; ++j) v.at(i, j) = a->value.at(i, from + j);
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, rows, cols, from, width] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < width; ++j)
                    g[i * cols + from + j] += out->grad[i * width + j];
        });
    }
    return out;
}

Var gather_cols(Tape* t, const Var& a, const std::vector<int>& idx) {
    require(a->value.rank() == 2, "gather_cols: rank-2 input required");
    const std::size_t rows = a->value.shape()[0], cols = a->value.shape()[1];
    require(idx.size() == rows, "gather_cols: index count mismatch");
    Tensor v({rows, 1});
    for (std::size_t i = 0; i < rows; ++i) {
        require(idx[i] >= 0 && static_cast<std::size_t>(idx[i]) < cols,
                "gather_cols: index out of range");
        v[i] = a->value.at(i, static_cast<std::size_t>(idx[i]));
    }
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out, idx, cols] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            double* g = ensure_grad(a).data();
            for (std::size_t i = 0; i < idx.size(); ++i)
                g[i * cols + static_cast<std::size_t>(idx[i])] += out->grad[i];
        });
    }
    return out;
}

Var mul_const(Tape* t, const Var& a, const Tensor& c) {
    require(a->value.same_shape(c), "mul_const: shape mismatch");
    Tensor v(a->value.shape());
    K().mul(v.numel(), a->value.data(), c.data(), v.data());
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        Tensor mask = c;
        t->record([a, out, mask = std::move(mask)] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            K().mul_acc(out->grad.numel(), out->grad.data(), mask.data(),
                        ensure_grad(a).data());
        });
    }
    return out;
}

Var bilinear_pairs(Tape* t, const Var& w, const Var& qd, const Var& qp) {
    require(w->value.rank() == 2 && qd->value.rank() == 2 && qp->value.rank() == 2,
            "bilinear_pairs: rank-2 inputs required");
    const std::size_t rows = qd->value.shape()[0];
    const std::size_t nd = qd->value.shape()[1], np = qp->value.shape()[1];
    require(w->value.shape()[0] == rows && qp->value.shape()[0] == rows,
            "bilinear_pairs: row mismatch");
    require(w->value.shape()[1] == nd * np, "bilinear_pairs: weight width != nd*np");

    Tensor v({rows, 1});
    for (std::size_t b = 0; b < rows; ++b) {
        const double* wb = w->value.data() + b * nd * np;
        const double* d = qd->value.data() + b * nd;
        const double* p = qp->value.data() + b * np;
        double acc = 0.0;
        for (std::size_t i = 0; i < nd; ++i) acc += d[i] * K().dot(np, wb + i * np, p);
        v[b] = acc;
    }
    const bool rec = t && (w->requires_grad || qd->requires_grad || qp->requires_grad);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([w, qd, qp, out, rows, nd, np] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            for (std::size_t b = 0; b < rows; ++b) {
                const double go = out->grad[b];
                if (go == 0.0) continue;
                const double* wb = w->value.data() + b * nd * np;
                const double* d = qd->value.data() + b * nd;
                const double* p = qp->value.data() + b * np;
                if (w->requires_grad) {
                    double* gw = ensure_grad(w).data() + b * nd * np;
                    for (std::size_t i = 0; i < nd; ++i)
                        K().axpy(np, go * d[i], p, gw + i * np);
                }
                if (qd->requires_grad) {
                    double* gd = ensure_grad(qd).data() + b * nd;
                    for (std::size_t i = 0; i < nd; ++i)
                        gd[i] += go * K().dot(np, wb + i * np, p);
                }
                if (qp->requires_grad) {
                    double* gp = ensure_grad(qp).data() + b * np;
                    for (std::size_t i = 0; i < nd; ++i)
                        K().axpy(np, go * d[i], wb + i * np, gp);
                }
            }
        });
    }
    return out;
}

Var reshape(Tape* t, const Var& a, std::vector<std::size_t> shape) {
    require(Tensor::numel_of(shape) == a->value.numel(), "reshape: element count changes");
    Tensor v(std::move(shape), a->value.vec());
    const bool rec = wants(t, a);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([a, out] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            K().axpy(out->grad.numel(), 1.0, out->grad.data(), ensure_grad(a).data());
        });
    }
    return out;
}

Var gru_cell(Tape* t, const Var& x, const Var& h, const Var& wx, const Var& wh,
             const Var& bx, const Var& bh) {
    require(x->value.rank() == 2 && h->value.rank() == 2, "gru_cell: rank-2 x and h required");
    const std::size_t B = x->value.shape()[0];
    const std::size_t in = x->value.shape()[1];
    const std::size_t H = h->value.shape()[1];
    require(h->value.shape()[0] == B, "gru_cell: batch mismatch");
    require(wx->value.shape() == std::vector<std::size_t>({in, 3 * H}), "gru_cell: wx shape");
    require(wh->value.shape() == std::vector<std::size_t>({H, 3 * H}), "gru_cell: wh shape");
    require(bx->value.numel() == 3 * H && bh->value.numel() == 3 * H, "gru_cell: bias shape");

    // gi/gh rows: [r | z | n] blocks of width H
    auto gates = std::make_shared<Tensor>(Tensor({B, 6 * H}));  // gi then gh per row
    Tensor gi({B, 3 * H}), gh({B, 3 * H});
    K().matmul(B, in, 3 * H, x->value.data(), wx->value.data(), gi.data());
    K().matmul(B, H, 3 * H, h->value.data(), wh->value.data(), gh.data());
    for (std::size_t b2 = 0; b2 < B; ++b2) {
        K().axpy(3 * H, 1.0, bx->value.data(), gi.data() + b2 * 3 * H);
        K().axpy(3 * H, 1.0, bh->value.data(), gh.data() + b2 * 3 * H);
    }

    // r, z, n and h' computed in place; keep what backward needs
    auto saved = std::make_shared<Tensor>(Tensor({B, 4 * H}));  // r, z, n, gh_n
    Tensor out({B, H});
    for (std::size_t b2 = 0; b2 < B; ++b2) {
        const double* gi_row = gi.data() + b2 * 3 * H;
        const double* gh_row = gh.data() + b2 * 3 * H;
        const double* h_row = h->value.data() + b2 * H;
        double* sv = saved->data() + b2 * 4 * H;
        double* o = out.data() + b2 * H;
        for (std::size_t j = 0; j < H; ++j) {
            const double r = 1.0 / (1.0 + std::exp(-(gi_row[j] + gh_row[j])));
            const double z = 1.0 / (1.0 + std::exp(-(gi_row[H + j] + gh_row[H + j])));
            const double ghn = gh_row[2 * H + j];
            const double n = std::tanh(gi_row[2 * H + j] + r * ghn);
            sv[j] = r;
            sv[H + j] = z;
            sv[2 * H + j] = n;
            sv[3 * H + j] = ghn;
            o[j] = (1.0 - z) * n + z * h_row[j];
        }
    }

    const bool rec = t && (x->requires_grad || h->requires_grad || wx->requires_grad ||
                           wh->requires_grad || bx->requires_grad || bh->requires_grad);
    Var res = out_like(std::move(out), rec);
    if (rec) {
        (void)gates;
        t->record([x, h, wx, wh, bx, bh, res, saved, B, in, H] {
            if (res->grad.numel() == 0) return;
            Tensor dgi({B, 3 * H}), dgh({B, 3 * H});
            for (std::size_t b2 = 0; b2 < B; ++b2) {
                const double* go = res->grad.data() + b2 * H;
                const double* sv = saved->data() + b2 * 4 * H;
                const double* h_row = h->value.data() + b2 * H;
                double* dgi_row = dgi.data() + b2 * 3 * H;
                double* dgh_row = dgh.data() + b2 * 3 * H;
                for (std::size_t j = 0; j < H; ++j) {
                    const double r = sv[j], z = sv[H + j], n = sv[2 * H + j],
                                 ghn = sv[3 * H + j];
                    const double dn = go[j] * (1.0 - z);
                    const double dz = go[j] * (h_row[j] - n);
                    const double dpre_n = dn * (1.0 - n * n);
                    const double dr = dpre_n * ghn;
                    const double dpre_r = dr * r * (1.0 - r);
                    const double dpre_z = dz * z * (1.0 - z);
                    dgi_row[j] = dpre_r;
                    dgi_row[H + j] = dpre_z;
                    dgi_row[2 * H + j] = dpre_n;
                    dgh_row[j] = dpre_r;
                    dgh_row[H + j] = dpre_z;
                    dgh_row[2 * H + j] = dpre_n * r;
                }
            }
            if (x->requires_grad)
                K().matmul_a_bt_acc(B, 3 * H, in, dgi.data(), wx->value.data(),
                                    ensure_grad(x).data());
            if (wx->requires_grad)
                K().matmul_at_b_acc(B, in, 3 * H, x->value.data(), dgi.data(),
                                    ensure_grad(wx).data());
            if (bx->requires_grad) {
                double* g = ensure_grad(bx).data();
                for (std::size_t b2 = 0; b2 < B; ++b2)
                    K().axpy(3 * H, 1.0, dgi.data() + b2 * 3 * H, g);
            }
            if (wh->requires_grad)
                K().matmul_at_b_acc(B, H, 3 * H, h->value.data(), dgh.data(),
                                    ensure_grad(wh).data());
            if (bh->requires_grad) {
                double* g = ensure_grad(bh).data();
                for (std::size_t b2 = 0; b2 < B; ++b2)
                    K().axpy(3 * H, 1.0, dgh.data() + b2 * 3 * H, g);
            }
            if (h->requires_grad) {
                double* g = ensure_grad(h).data();
                K().matmul_a_bt_acc(B, 3 * H, H, dgh.data(), wh->value.data(), g);
                // plus the direct h' = ... + z*h path
                for (std::size_t b2 = 0; b2 < B; ++b2) {
                    const double* go = res->grad.data() + b2 * H;
                    const double* sv = saved->data() + b2 * 4 * H;
                    for (std::size_t j = 0; j < H; ++j)
                        g[b2 * H + j] += go[j] * sv[H + j];
                }
            }
        });
    }
    return res;
}

Var rowwise_matvec(Tape* t, const Var& w, const Var& q, std::size_t e_dim) {
    require(w->value.rank() == 2 && q->value.rank() == 2,
            "rowwise_matvec: rank-2 inputs required");
    const std::size_t rows = q->value.shape()[0];
    const std::size_t s_dim = q->value.shape()[1];
    require(w->value.shape()[0] == rows, "rowwise_matvec: row mismatch");
    require(w->value.shape()[1] == s_dim * e_dim, "rowwise_matvec: weight width != S*E");

    Tensor v({rows, e_dim});
    for (std::size_t b = 0; b < rows; ++b) {
        const double* wb = w->value.data() + b * s_dim * e_dim;
        const double* qb = q->value.data() + b * s_dim;
        double* o = v.data() + b * e_dim;
        for (std::size_t s = 0; s < s_dim; ++s) K().axpy(e_dim, qb[s], wb + s * e_dim, o);
    }
    const bool rec = wants(t, w, q);
    Var out = out_like(std::move(v), rec);
    if (rec) {
        t->record([w, q, out, rows, s_dim, e_dim] {
            if (out->grad.numel() == 0) return;  // never reached by the loss
            for (std::size_t b = 0; b < rows; ++b) {
                const double* go = out->grad.data() + b * e_dim;
                const double* wb = w->value.data() + b * s_dim * e_dim;
                const double* qb = q->value.data() + b * s_dim;
                if (w->requires_grad) {
                    double* gw = ensure_grad(w).data() + b * s_dim * e_dim;
                    for (std::size_t s = 0; s < s_dim; ++s)
                        K().axpy(e_dim, qb[s], go, gw + s * e_dim);
                }
                if (q->requires_grad) {
                    double* gq = ensure_grad(q).data() + b * s_dim;
                    for (std::size_t s = 0; s < s_dim; ++s)
                        gq[s] += K().dot(e_dim, wb + s * e_dim, go);
                }
            }
        });
    }
    return out;
}

}  // namespace ac::grad
