#pragma once

#include "tga/augment.hpp"
#include "tga/graphs.hpp"
#include "tga/params.hpp"

#include <cstdint>
#include <string>

namespace tga {

inline constexpr std::size_t kHiddenDim = 64;
inline constexpr std::size_t kHeadHidden = 32;
// Mask logits start at +3 so the initial mask (~0.95) barely perturbs the
// pretrained encoder's inputs; biomarker ranking measures deviation from it.
inline constexpr double kMaskInitLogit = 3.0;

enum class TaskKind { classification, regression };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind t);

// Parameter layouts. Names double as checkpoint tensor names.
//   encoder.w0 [N x 64], encoder.w1 [64 x 64]
//   projector.w1/b1/w2/b2   64 -> 64 -> 64, ReLU between
//   head.w1/b1/w2/b2        64 -> 32 -> C (C = 1 for regression)
//   mask.logits [N x N]
ParamSet init_pretext_params(std::size_t n_rois, std::uint64_t seed);
ParamSet init_task_params(std::size_t n_rois, std::size_t n_outputs, bool use_mask,
                          std::uint64_t seed);

// ---- Two-layer GCN encoder: Z = ReLU(Ahat ReLU(Ahat X W0) W1) ----

struct EncodeCache {
    Tensor xw, h_pre, h, hw, z_pre, z;
};

Tensor encode_forward(const Tensor& mp, const Tensor& x, const Tensor& w0,
                      const Tensor& w1, EncodeCache& cache);

// Accumulates dW0/dW1 (and the message-passing-matrix gradient when dmp is
// non-null, needed for attention-mask training).
void encode_backward(const Tensor& mp, const Tensor& x, const Tensor& w1,
                     const EncodeCache& cache, const Tensor& dz, Tensor& dw0,
                     Tensor& dw1, Tensor* dmp);

// Forward-only conveniences over a ParamSet.
Tensor encode(const AugmentedView& view, const ParamSet& params);
Tensor graph_embedding(const AugmentedView& view, const ParamSet& params);

// ---- Projector MLP (pretext head) ----

struct MlpCache {
    Tensor a1, r;
};

Tensor mlp_forward(const Tensor& z, const Tensor& w1, const Tensor& b1,
                   const Tensor& w2, const Tensor& b2, MlpCache& cache);
// Accumulates weight/bias grads and returns gradient w.r.t. the input row.
Tensor mlp_backward(const Tensor& z, const Tensor& w1, const Tensor& w2,
                    const MlpCache& cache, const Tensor& dout, Tensor& dw1,
                    Tensor& db1, Tensor& dw2, Tensor& db2);

Tensor project(const Tensor& z, const ParamSet& params);

// ---- Stop-gradient contrastive loss ----
// L = Psi(sg(z1), p2) + Psi(sg(z2), p1). No gradient flows into z1 through
// the first term nor into z2 through the second; the encoders are reached
// only through p1/p2.
double contrastive_loss(const Tensor& z1, const Tensor& z2, const Tensor& p1,
                        const Tensor& p2);
void contrastive_loss_backward(const Tensor& z1, const Tensor& z2, const Tensor& p1,
                               const Tensor& p2, double upstream, Tensor& dp1,
                               Tensor& dp2);

// Full pretext objective for one view pair. The *_and_grad variant
// accumulates parameter gradients scaled by grad_scale.
double pretext_loss(const AugmentedView& v1, const AugmentedView& v2,
                    const ParamSet& params);
double pretext_loss_and_grad(const AugmentedView& v1, const AugmentedView& v2,
                             ParamSet& params, double grad_scale);

// ---- Task-specific model with learnable attention mask ----

struct MaskedEncodeCache {
    Tensor mp;     // normalized adjacency of the full graph
    Tensor meff;   // symmetrized sigmoid(mask.logits)
    Tensor mp_eff; // mp (elementwise x) meff, or mp when the mask is off
    EncodeCache enc;
};

// Symmetrized effective mask (sigmoid(L) + sigmoid(L)^T) / 2.
Tensor effective_mask(const Tensor& logits);

Tensor masked_encode_forward(const BrainGraph& g, const ParamSet& params,
                             bool use_mask, MaskedEncodeCache& cache);
Tensor masked_encode(const BrainGraph& g, const ParamSet& params, bool use_mask);

// head(row_mean(masked_encode(...))): 1 x C logits or 1 x 1 score.
Tensor predict(const BrainGraph& g, const ParamSet& params, bool use_mask);

struct Target {
    std::size_t label = 0; // classification
    double score = 0.0;    // regression
};

double task_loss(const BrainGraph& g, const Target& target, TaskKind task,
                 const ParamSet& params, bool use_mask);
double task_loss_and_grad(const BrainGraph& g, const Target& target, TaskKind task,
                          ParamSet& params, bool use_mask, double grad_scale);

} // namespace tga
