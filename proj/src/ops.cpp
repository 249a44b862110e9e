#include "tga/ops.hpp"

#include "tga/errors.hpp"
#include "tga/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tga {

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions differ, a is " + a.shape_str() +
                         ", b is " + b.shape_str());
    Tensor c(a.rows(), b.cols());
    kernels::matmul_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows())
        throw ShapeError("matmul_tn: inner dimensions differ, a is " + a.shape_str() +
                         ", b is " + b.shape_str());
    Tensor c(a.cols(), b.cols());
    kernels::matmul_tn(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
    return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols())
        throw ShapeError("matmul_nt: inner dimensions differ, a is " + a.shape_str() +
                         ", b is " + b.shape_str());
    Tensor c(a.rows(), b.rows());
    kernels::matmul_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

Tensor transpose(const Tensor& a) {
    Tensor t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Tensor relu(const Tensor& x) {
    Tensor y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    return y;
}

Tensor relu_backward(const Tensor& upstream, const Tensor& x) {
    if (!upstream.same_shape(x))
        throw ShapeError("relu_backward: gradient " + upstream.shape_str() +
                         " vs input " + x.shape_str());
    Tensor g(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? upstream[i] : 0.0;
    return g;
}

Tensor row_mean(const Tensor& z) {
    if (z.rows() == 0)
        throw DomainError("row_mean: empty matrix, graph has no surviving nodes");
    Tensor m(1, z.cols());
    const double inv = 1.0 / static_cast<double>(z.rows());
    for (std::size_t j = 0; j < z.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) s += z(i, j);
        m[j] = s * inv;
    }
    return m;
}

Tensor row_mean_backward(const Tensor& upstream, std::size_t rows) {
    Tensor g(rows, upstream.cols());
    const double inv = 1.0 / static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < upstream.cols(); ++j) g(i, j) = upstream[j] * inv;
    return g;
}

static double dot(const Tensor& u, const Tensor& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double neg_cosine(const Tensor& u, const Tensor& v) {
    if (u.size() != v.size())
        throw ShapeError("neg_cosine: lengths differ, " + u.shape_str() + " vs " +
                         v.shape_str());
    const double nu = std::sqrt(dot(u, u));
    const double nv = std::sqrt(dot(v, v));
    if (nu == 0.0 || nv == 0.0)
        throw DomainError("neg_cosine: degenerate zero-norm embedding");
    return -dot(u, v) / (nu * nv);
}

void neg_cosine_backward(const Tensor& u, const Tensor& v, double upstream,
                         Tensor& du, Tensor& dv) {
    const double nu = std::sqrt(dot(u, u));
    const double nv = std::sqrt(dot(v, v));
    if (nu == 0.0 || nv == 0.0)
        throw DomainError("neg_cosine: degenerate zero-norm embedding");
    const double uv = dot(u, v);
    // d(-cos)/du = -v/(|u||v|) + (u.v) u / (|u|^3 |v|)
    const double inv_uv_norm = 1.0 / (nu * nv);
    const double cu = uv / (nu * nu * nu * nv);
    const double cv = uv / (nu * nv * nv * nv);
    for (std::size_t i = 0; i < u.size(); ++i) {
        du[i] += upstream * (-v[i] * inv_uv_norm + cu * u[i]);
        dv[i] += upstream * (-u[i] * inv_uv_norm + cv * v[i]);
    }
}

double softmax_cross_entropy(const Tensor& logits, std::size_t label) {
    if (label >= logits.size())
        throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) +
                                " out of range for " + std::to_string(logits.size()) +
                                " classes");
    const double mx = *std::max_element(logits.data(), logits.data() + logits.size());
    double lse = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) lse += std::exp(logits[i] - mx);
    return std::log(lse) - (logits[label] - mx);
}

Tensor softmax_cross_entropy_backward(const Tensor& logits, std::size_t label) {
    if (label >= logits.size())
        throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) +
                                " out of range for " + std::to_string(logits.size()) +
                                " classes");
    const double mx = *std::max_element(logits.data(), logits.data() + logits.size());
    Tensor g(logits.rows(), logits.cols());
    double lse = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        g[i] = std::exp(logits[i] - mx);
        lse += g[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) g[i] /= lse;
    g[label] -= 1.0;
    return g;
}

double mae_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target))
        throw ShapeError("mae_loss: shapes differ, " + pred.shape_str() + " vs " +
                         target.shape_str());
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return s / static_cast<double>(pred.size());
}

Tensor mae_loss_backward(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target))
        throw ShapeError("mae_loss: shapes differ, " + pred.shape_str() + " vs " +
                         target.shape_str());
    Tensor g(pred.rows(), pred.cols());
    const double inv = 1.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        g[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
    }
    return g;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw ShapeError("hadamard: shapes differ, " + a.shape_str() + " vs " +
                         b.shape_str());
    Tensor c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
    return c;
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
    if (!x.same_shape(y))
        throw ShapeError("axpy: shapes differ, " + x.shape_str() + " vs " + y.shape_str());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Tensor sigmoid(const Tensor& x) {
    Tensor y(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
    return y;
}

} // namespace tga
