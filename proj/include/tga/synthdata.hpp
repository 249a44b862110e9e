#pragma once

#include "tga/dataset.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace tga {

// Synthetic fMRI cohort with planted block structure. Each subject's series
// follows a latent-factor model: x = sqrt(lambda) * f_block +
// sqrt(1 - lambda) * noise_level * eps, with lambda solved so the expected
// within-block correlation hits the requested rho. Class 1 gets base_rho +
// boost_delta on the designated block; pretext cohorts jitter rho per subject
// and strip labels. Regression scores are a fixed clamped affine map of the
// subject's realized designated-block mean correlation.
struct SynthSpec {
    std::string task = "classification"; // classification | regression | pretext
    int n_per_class = 20;                // labeled cohorts (two classes)
    int n_subjects = 400;                // pretext cohorts
    int n_rois = 90;
    int t_points = 230;
    std::vector<std::vector<int>> blocks; // empty = 3 contiguous equal blocks
    int designated_block = 0;
    double base_rho = 0.2;
    double boost_delta = 0.4;
    double noise_level = 1.0;
    double rho_jitter = 0.05; // pretext only
    std::uint64_t seed = 7;
    // score = clamp((c - score_c_lo) / (score_c_hi - score_c_lo), 0, 1);
    // NaN defaults resolve to base_rho - 0.1 and base_rho + boost_delta + 0.1
    double score_c_lo = std::numeric_limits<double>::quiet_NaN();
    double score_c_hi = std::numeric_limits<double>::quiet_NaN();

    void validate() const; // throws ConfigError
    std::vector<std::vector<int>> resolved_blocks() const;
    double resolved_score_lo() const;
    double resolved_score_hi() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
SynthSpec load_synth_spec(const std::filesystem::path& path);
nlohmann::ordered_json synth_spec_to_json(const SynthSpec& spec);

// Writes one CSV per subject plus manifest.json into out_dir and returns the
// manifest. Rerunning with the same spec produces bitwise-identical files.
Manifest generate_cohort(const SynthSpec& spec, const std::filesystem::path& out_dir);

} // namespace tga
