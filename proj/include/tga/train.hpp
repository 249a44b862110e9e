#pragma once

#include "tga/augment.hpp"
#include "tga/checkpoint.hpp"
#include "tga/graphs.hpp"
#include "tga/models.hpp"
#include "tga/params.hpp"

#include <cstdint>
#include <vector>

namespace tga {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 16;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    AugmentStrategy strategy;
    TaskKind task = TaskKind::classification;
    bool naive = false;          // ignore any pretext checkpoint
    bool freeze_encoder = false; // keep encoder tensors bitwise fixed
    bool use_mask = true;        // learnable attention mask

    void validate() const;
};

struct PretrainResult {
    ParamSet params;
    std::vector<double> epoch_mean_loss;
    std::vector<double> step_loss; // per-batch mean, in step order
};

// Self-supervised pretext training: per epoch, shuffle the cohort, resample
// two views per graph, average the contrastive loss over each batch and take
// one Adam step. Every step loss is checked against the [-2, 0] bound and
// finiteness; violations raise DivergedError with the epoch index.
PretrainResult pretrain(const std::vector<BrainGraph>& cohort, const TrainConfig& cfg);

struct FinetuneResult {
    ParamSet params;
    std::size_t n_outputs = 0;
    // Regression targets are min-max normalized with training statistics;
    // evaluation must reuse these.
    double target_min = 0.0;
    double target_max = 1.0;
};

// Task-specific training on the full (unaugmented) graphs. The encoder is
// initialized from `init` unless cfg.naive; cfg.freeze_encoder pins the
// encoder tensors; cfg.use_mask enables the attention mask.
FinetuneResult finetune(const std::vector<BrainGraph>& graphs,
                        const std::vector<Target>& targets, const Checkpoint* init,
                        const TrainConfig& cfg);

// Rebuilds a parameter set (values only) from checkpoint tensors, preserving
// their order.
ParamSet params_from_checkpoint(const Checkpoint& ckpt);

} // namespace tga
