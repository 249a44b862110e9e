#pragma once

#include "tga/augment.hpp"
#include "tga/models.hpp"
#include "tga/train.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace tga {

// Run configuration for the CLI. Loaded from a JSON document validated
// against a fixed schema: unknown keys are rejected at every level, missing
// keys take the defaults below. Flags override config keys, which override
// defaults.
struct CliConfig {
    std::uint64_t seed = 42;
    TaskKind task = TaskKind::classification;
    AugmentStrategy augment; // kind hnd, alpha 0.1, beta 0.5

    int pretrain_epochs = 50;
    int pretrain_batch_size = 16;
    double pretrain_lr = 1e-3;

    int finetune_epochs = 100;
    int finetune_batch_size = 8;
    double finetune_lr = 1e-3;
    bool naive = false;
    bool freeze_encoder = false;
    bool use_mask = true;

    int folds = 5;
    double threshold = 0.5;

    int threads = 0; // 0 = leave the OpenMP default

    void validate() const;
    TrainConfig pretrain_config() const;
    TrainConfig finetune_config() const;
};

CliConfig config_from_json(const nlohmann::json& doc);
CliConfig load_config(const std::filesystem::path& path);

// Fully resolved echo, written into every output file.
nlohmann::ordered_json config_to_json(const CliConfig& cfg);

} // namespace tga
