#pragma once

#include <vector>

#include "ac/grad/tape.hpp"

// Taped tensor ops. Every op takes the tape first; passing nullptr computes
// the value without recording (used for ungraded forwards: action selection,
// target networks). Shapes follow the comments; [B,*] rows are batch samples.

namespace ac::grad {

Var constant(Tensor value);

// C[M,N] = A[M,K] * B[K,N]
Var matmul(Tape* t, const Var& a, const Var& b);
// X[B,in] * W[in,out] + bias[out] broadcast over rows
Var linear(Tape* t, const Var& x, const Var& w, const Var& bias);

Var add(Tape* t, const Var& a, const Var& b);   // same shape
Var sub(Tape* t, const Var& a, const Var& b);   // same shape
Var mul(Tape* t, const Var& a, const Var& b);   // hadamard, same shape
Var add_rowvec(Tape* t, const Var& m, const Var& v);  // [B,N] + [N]

Var scale(Tape* t, const Var& a, double s);
Var add_scalar(Tape* t, const Var& a, double c);
Var rsub_scalar(Tape* t, const Var& a, double c);  // c - a

Var sigmoid(Tape* t, const Var& a);
Var tanh_op(Tape* t, const Var& a);
Var relu(Tape* t, const Var& a);
Var elu(Tape* t, const Var& a);
Var abs_op(Tape* t, const Var& a);

Var softmax_rows(Tape* t, const Var& a);  // row-wise softmax on [B,N]

Var sum(Tape* t, const Var& a);                  // -> scalar [1]
Var row_sum(Tape* t, const Var& a);              // [B,N] -> [B,1]
Var concat_cols(Tape* t, const std::vector<Var>& parts);     // [B,Ni] -> [B,sum Ni]
Var slice_cols(Tape* t, const Var& a, std::size_t from, std::size_t to);
Var gather_cols(Tape* t, const Var& a, const std::vector<int>& idx);  // [B,N],idx[B] -> [B,1]

// Elementwise product with a constant (no gradient through the constant).
Var mul_const(Tape* t, const Var& a, const Tensor& c);

// Same data, new shape (row-major layout unchanged).
Var reshape(Tape* t, const Var& a, std::vector<std::size_t> shape);

// out[b] = sum_{i,j} w[b, i*np + j] * qd[b,i] * qp[b,j]; shapes w[B,nd*np],
// qd[B,nd], qp[B,np] -> [B,1]. The pairwise interaction term of the mixers.
Var bilinear_pairs(Tape* t, const Var& w, const Var& qd, const Var& qp);

// out[b,e] = sum_s w[b, s*E + e] * q[b,s]; per-sample matrix-vector product
// with hypernetwork-generated weights. w[B,S*E], q[B,S] -> [B,E].
Var rowwise_matvec(Tape* t, const Var& w, const Var& q, std::size_t e_dim);

// Fused gated recurrent cell, gate order (r, z, n):
//   gi = x*wx + bx, gh = h*wh + bh
//   r = sigmoid(gi_r + gh_r), z = sigmoid(gi_z + gh_z)
//   n = tanh(gi_n + r * gh_n), h' = (1-z)*n + z*h
// One tape record with a hand-written backward; x[B,in], h[B,H],
// wx[in,3H], wh[H,3H], bx[3H], bh[3H] -> [B,H].
Var gru_cell(Tape* t, const Var& x, const Var& h, const Var& wx, const Var& wh,
             const Var& bx, const Var& bh);

}  // namespace ac::grad
