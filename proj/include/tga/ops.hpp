#pragma once

#include "tga/tensor.hpp"

#include <cstddef>

namespace tga {

// Forward operations with hand-derived backward rules. The model graph is
// static, so gradients are propagated by calling the *_backward functions in
// reverse order rather than through an expression tape.

// Matrix products. Gradients: da = g * b^T, db = a^T * g.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_tn(const Tensor& a, const Tensor& b); // a^T * b
Tensor matmul_nt(const Tensor& a, const Tensor& b); // a * b^T

Tensor transpose(const Tensor& a);

// Elementwise max(0, x). Backward masks the upstream gradient by x > 0;
// the subgradient at exactly 0 is 0.
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& upstream, const Tensor& x);

// Column means over rows: z[r x c] -> 1 x c. Backward spreads upstream/r.
Tensor row_mean(const Tensor& z);
Tensor row_mean_backward(const Tensor& upstream, std::size_t rows);

// Negative cosine similarity of two equal-length vectors, in [-1, 1].
double neg_cosine(const Tensor& u, const Tensor& v);
// Accumulates upstream * d(neg_cosine)/du and /dv into du, dv.
void neg_cosine_backward(const Tensor& u, const Tensor& v, double upstream,
                         Tensor& du, Tensor& dv);

// -log softmax(logits)[label] for 1 x C logits, max-subtracted for stability.
double softmax_cross_entropy(const Tensor& logits, std::size_t label);
Tensor softmax_cross_entropy_backward(const Tensor& logits, std::size_t label);

// Mean absolute error. Subgradient sign(pred - target)/n, 0 at ties.
double mae_loss(const Tensor& pred, const Tensor& target);
Tensor mae_loss_backward(const Tensor& pred, const Tensor& target);

// Elementwise helpers.
Tensor hadamard(const Tensor& a, const Tensor& b);
void axpy(double alpha, const Tensor& x, Tensor& y); // y += alpha * x
Tensor sigmoid(const Tensor& x);

} // namespace tga
