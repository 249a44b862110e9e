#pragma once

#include "tga/graphs.hpp"
#include "tga/models.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tga {

struct SubjectRecord {
    std::string id;
    std::string path; // relative to the manifest's directory unless absolute
    std::optional<int> label;
    std::optional<double> score;
};

// Manifest JSON: {n_rois, task, subjects: [{id, path, label|score}]}. The
// task is "classification", "regression" or "pretext" (unlabeled).
struct Manifest {
    std::size_t n_rois = 0;
    std::string task;
    std::vector<SubjectRecord> subjects;
    std::filesystem::path base_dir; // set by load_manifest
};

Manifest load_manifest(const std::filesystem::path& path);

struct Cohort {
    std::vector<BrainGraph> graphs;
    std::vector<Target> targets; // empty for pretext manifests
};

// Loads every subject's time series and builds brain graphs, in manifest
// order. Validates the shared ROI count and the presence of the labels or
// scores the manifest's task requires.
Cohort load_cohort(const Manifest& manifest);

} // namespace tga
