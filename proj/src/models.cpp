#include "tga/models.hpp"

#include "tga/errors.hpp"
#include "tga/ops.hpp"

#include <cmath>

namespace tga {

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "classification") return TaskKind::classification;
    if (s == "regression") return TaskKind::regression;
    throw ConfigError("unknown task '" + s + "' (expected classification or regression)");
}

std::string to_string(TaskKind t) {
    return t == TaskKind::classification ? "classification" : "regression";
}

ParamSet init_pretext_params(std::size_t n, std::uint64_t seed) {
    ParamSet p;
    p.add("encoder.w0", uniform_init(n, kHiddenDim, n, seed, "encoder.w0"));
    p.add("encoder.w1", uniform_init(kHiddenDim, kHiddenDim, kHiddenDim, seed, "encoder.w1"));
    p.add("projector.w1",
          uniform_init(kHiddenDim, kHiddenDim, kHiddenDim, seed, "projector.w1"));
    p.add("projector.b1", Tensor(1, kHiddenDim));
    p.add("projector.w2",
          uniform_init(kHiddenDim, kHiddenDim, kHiddenDim, seed, "projector.w2"));
    p.add("projector.b2", Tensor(1, kHiddenDim));
    return p;
}

ParamSet init_task_params(std::size_t n, std::size_t n_outputs, bool use_mask,
                          std::uint64_t seed) {
    ParamSet p;
    p.add("encoder.w0", uniform_init(n, kHiddenDim, n, seed, "encoder.w0"));
    p.add("encoder.w1", uniform_init(kHiddenDim, kHiddenDim, kHiddenDim, seed, "encoder.w1"));
    if (use_mask) p.add("mask.logits", Tensor(n, n, kMaskInitLogit));
    p.add("head.w1", uniform_init(kHiddenDim, kHeadHidden, kHiddenDim, seed, "head.w1"));
    p.add("head.b1", Tensor(1, kHeadHidden));
    p.add("head.w2", uniform_init(kHeadHidden, n_outputs, kHeadHidden, seed, "head.w2"));
    p.add("head.b2", Tensor(1, n_outputs));
    return p;
}

Tensor encode_forward(const Tensor& mp, const Tensor& x, const Tensor& w0,
                      const Tensor& w1, EncodeCache& cache) {
    if (x.cols() != w0.rows())
        throw ShapeError("encode: feature width " + x.shape_str() +
                         " does not match encoder input " + w0.shape_str());
    cache.xw = matmul(x, w0);
    cache.h_pre = matmul(mp, cache.xw);
    cache.h = relu(cache.h_pre);
    cache.hw = matmul(cache.h, w1);
    cache.z_pre = matmul(mp, cache.hw);
    cache.z = relu(cache.z_pre);
    return cache.z;
}

void encode_backward(const Tensor& mp, const Tensor& x, const Tensor& w1,
                     const EncodeCache& cache, const Tensor& dz, Tensor& dw0,
                     Tensor& dw1, Tensor* dmp) {
    const Tensor dz_pre = relu_backward(dz, cache.z_pre);
    const Tensor dhw = matmul_tn(mp, dz_pre);
    axpy(1.0, matmul_tn(cache.h, dhw), dw1);
    const Tensor dh = matmul_nt(dhw, w1);
    const Tensor dh_pre = relu_backward(dh, cache.h_pre);
    const Tensor dxw = matmul_tn(mp, dh_pre);
    axpy(1.0, matmul_tn(x, dxw), dw0);
    if (dmp) {
        axpy(1.0, matmul_nt(dz_pre, cache.hw), *dmp);
        axpy(1.0, matmul_nt(dh_pre, cache.xw), *dmp);
    }
}

Tensor encode(const AugmentedView& view, const ParamSet& params) {
    EncodeCache cache;
    return encode_forward(view.mp_matrix, view.x_view, params.at("encoder.w0").value,
                          params.at("encoder.w1").value, cache);
}

Tensor graph_embedding(const AugmentedView& view, const ParamSet& params) {
    return row_mean(encode(view, params));
}

Tensor mlp_forward(const Tensor& z, const Tensor& w1, const Tensor& b1,
                   const Tensor& w2, const Tensor& b2, MlpCache& cache) {
    cache.a1 = matmul(z, w1);
    for (std::size_t j = 0; j < cache.a1.size(); ++j) cache.a1[j] += b1[j];
    cache.r = relu(cache.a1);
    Tensor out = matmul(cache.r, w2);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += b2[j];
    return out;
}

Tensor mlp_backward(const Tensor& z, const Tensor& w1, const Tensor& w2,
                    const MlpCache& cache, const Tensor& dout, Tensor& dw1,
                    Tensor& db1, Tensor& dw2, Tensor& db2) {
    axpy(1.0, matmul_tn(cache.r, dout), dw2);
    axpy(1.0, dout, db2);
    const Tensor dr = matmul_nt(dout, w2);
    const Tensor da1 = relu_backward(dr, cache.a1);
    axpy(1.0, matmul_tn(z, da1), dw1);
    axpy(1.0, da1, db1);
    return matmul_nt(da1, w1);
}

Tensor project(const Tensor& z, const ParamSet& params) {
    MlpCache cache;
    return mlp_forward(z, params.at("projector.w1").value, params.at("projector.b1").value,
                       params.at("projector.w2").value, params.at("projector.b2").value,
                       cache);
}

double contrastive_loss(const Tensor& z1, const Tensor& z2, const Tensor& p1,
                        const Tensor& p2) {
    return neg_cosine(z1, p2) + neg_cosine(z2, p1);
}

void contrastive_loss_backward(const Tensor& z1, const Tensor& z2, const Tensor& p1,
                               const Tensor& p2, double upstream, Tensor& dp1,
                               Tensor& dp2) {
    // The z arguments are stop-gradient: their direct partials are dropped.
    Tensor discard1(z1.rows(), z1.cols());
    Tensor discard2(z2.rows(), z2.cols());
    neg_cosine_backward(z1, p2, upstream, discard1, dp2);
    neg_cosine_backward(z2, p1, upstream, discard2, dp1);
}

namespace {

struct BranchCache {
    EncodeCache enc;
    MlpCache proj;
    Tensor z; // graph embedding
    Tensor p; // projected embedding
};

Tensor branch_forward(const AugmentedView& view, const ParamSet& params,
                      BranchCache& cache) {
    encode_forward(view.mp_matrix, view.x_view, params.at("encoder.w0").value,
                   params.at("encoder.w1").value, cache.enc);
    cache.z = row_mean(cache.enc.z);
    cache.p = mlp_forward(cache.z, params.at("projector.w1").value,
                          params.at("projector.b1").value, params.at("projector.w2").value,
                          params.at("projector.b2").value, cache.proj);
    return cache.p;
}

void branch_backward(const AugmentedView& view, ParamSet& params,
                     const BranchCache& cache, const Tensor& dp) {
    Tensor dz = mlp_backward(cache.z, params.at("projector.w1").value,
                             params.at("projector.w2").value, cache.proj, dp,
                             params.at("projector.w1").grad, params.at("projector.b1").grad,
                             params.at("projector.w2").grad, params.at("projector.b2").grad);
    const Tensor dzmat = row_mean_backward(dz, cache.enc.z.rows());
    encode_backward(view.mp_matrix, view.x_view, params.at("encoder.w1").value, cache.enc,
                    dzmat, params.at("encoder.w0").grad, params.at("encoder.w1").grad,
                    nullptr);
}

} // namespace

double pretext_loss(const AugmentedView& v1, const AugmentedView& v2,
                    const ParamSet& params) {
    BranchCache c1, c2;
    branch_forward(v1, params, c1);
    branch_forward(v2, params, c2);
    return contrastive_loss(c1.z, c2.z, c1.p, c2.p);
}

double pretext_loss_and_grad(const AugmentedView& v1, const AugmentedView& v2,
                             ParamSet& params, double grad_scale) {
    BranchCache c1, c2;
    branch_forward(v1, params, c1);
    branch_forward(v2, params, c2);
    const double loss = contrastive_loss(c1.z, c2.z, c1.p, c2.p);

    Tensor dp1(1, kHiddenDim), dp2(1, kHiddenDim);
    contrastive_loss_backward(c1.z, c2.z, c1.p, c2.p, grad_scale, dp1, dp2);
    branch_backward(v1, params, c1, dp1);
    branch_backward(v2, params, c2, dp2);
    return loss;
}

Tensor effective_mask(const Tensor& logits) {
    const Tensor s = sigmoid(logits);
    Tensor m(s.rows(), s.cols());
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) m(i, j) = 0.5 * (s(i, j) + s(j, i));
    return m;
}

Tensor masked_encode_forward(const BrainGraph& g, const ParamSet& params,
                             bool use_mask, MaskedEncodeCache& cache) {
    cache.mp = normalize_adjacency(g.adjacency);
    if (use_mask) {
        const Tensor& logits = params.at("mask.logits").value;
        if (logits.rows() != g.adjacency.rows())
            throw ShapeError("mask.logits is " + logits.shape_str() + " but graph has " +
                             std::to_string(g.adjacency.rows()) + " nodes");
        cache.meff = effective_mask(logits);
        cache.mp_eff = hadamard(cache.mp, cache.meff);
    } else {
        cache.mp_eff = cache.mp;
    }
    return encode_forward(cache.mp_eff, g.features, params.at("encoder.w0").value,
                          params.at("encoder.w1").value, cache.enc);
}

Tensor masked_encode(const BrainGraph& g, const ParamSet& params, bool use_mask) {
    MaskedEncodeCache cache;
    return masked_encode_forward(g, params, use_mask, cache);
}

static void masked_encode_backward(const BrainGraph& g, ParamSet& params, bool use_mask,
                                   const MaskedEncodeCache& cache, const Tensor& dz) {
    Tensor dmp(cache.mp_eff.rows(), cache.mp_eff.cols());
    encode_backward(cache.mp_eff, g.features, params.at("encoder.w1").value, cache.enc, dz,
                    params.at("encoder.w0").grad, params.at("encoder.w1").grad,
                    use_mask ? &dmp : nullptr);
    if (!use_mask) return;

    const Tensor& logits = params.at("mask.logits").value;
    Tensor& dlogits = params.at("mask.logits").grad;
    // meff = (sigmoid(L) + sigmoid(L)^T)/2, mp_eff = mp (x) meff
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            const double dmeff_ij = dmp(i, j) * cache.mp(i, j);
            const double dmeff_ji = dmp(j, i) * cache.mp(j, i);
            const double s = 1.0 / (1.0 + std::exp(-logits(i, j)));
            dlogits(i, j) += s * (1.0 - s) * 0.5 * (dmeff_ij + dmeff_ji);
        }
    }
}

Tensor predict(const BrainGraph& g, const ParamSet& params, bool use_mask) {
    MaskedEncodeCache cache;
    masked_encode_forward(g, params, use_mask, cache);
    const Tensor z = row_mean(cache.enc.z);
    MlpCache head;
    return mlp_forward(z, params.at("head.w1").value, params.at("head.b1").value,
                       params.at("head.w2").value, params.at("head.b2").value, head);
}

double task_loss(const BrainGraph& g, const Target& target, TaskKind task,
                 const ParamSet& params, bool use_mask) {
    const Tensor out = predict(g, params, use_mask);
    if (task == TaskKind::classification) return softmax_cross_entropy(out, target.label);
    Tensor t(1, 1);
    t[0] = target.score;
    return mae_loss(out, t);
}

double task_loss_and_grad(const BrainGraph& g, const Target& target, TaskKind task,
                          ParamSet& params, bool use_mask, double grad_scale) {
    MaskedEncodeCache cache;
    masked_encode_forward(g, params, use_mask, cache);
    const Tensor z = row_mean(cache.enc.z);
    MlpCache head;
    const Tensor out =
        mlp_forward(z, params.at("head.w1").value, params.at("head.b1").value,
                    params.at("head.w2").value, params.at("head.b2").value, head);

    double loss = 0.0;
    Tensor dout;
    if (task == TaskKind::classification) {
        loss = softmax_cross_entropy(out, target.label);
        dout = softmax_cross_entropy_backward(out, target.label);
    } else {
        Tensor t(1, 1);
        t[0] = target.score;
        loss = mae_loss(out, t);
        dout = mae_loss_backward(out, t);
    }
    for (std::size_t i = 0; i < dout.size(); ++i) dout[i] *= grad_scale;

    Tensor dz = mlp_backward(z, params.at("head.w1").value, params.at("head.w2").value,
                             head, dout, params.at("head.w1").grad,
                             params.at("head.b1").grad, params.at("head.w2").grad,
                             params.at("head.b2").grad);
    const Tensor dzmat = row_mean_backward(dz, cache.enc.z.rows());
    masked_encode_backward(g, params, use_mask, cache, dzmat);
    return loss;
}

} // namespace tga
