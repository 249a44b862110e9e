#pragma once

#include "tga/checkpoint.hpp"
#include "tga/graphs.hpp"
#include "tga/models.hpp"
#include "tga/train.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace tga {

using MetricMap = std::map<std::string, double>;

// Binary classification metrics on fractions in [0, 1]. AUC is the
// Mann-Whitney statistic (ties scored 0.5); ACC/SEN/SPE at the threshold
// (predicted positive when score >= threshold); BAC = (SEN + SPE) / 2.
// Throws DataError naming the metric when only one class is present.
MetricMap classification_metrics(const std::vector<int>& labels,
                                 const std::vector<double>& scores, double threshold);

// MAE, MSE and the Pearson correlation of (targets, preds). Throws DataError
// on fewer than 2 points or zero target variance.
MetricMap regression_metrics(const std::vector<double>& targets,
                             const std::vector<double>& preds);

struct FoldResult {
    int fold_index = 0;
    MetricMap metrics; // percentages for classification, raw for regression
};

struct AggregateEntry {
    double mean = 0.0;
    double stddev = 0.0; // sample std over folds
    std::string formatted;
};

struct EvalReport {
    nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    TaskKind task = TaskKind::classification;
    std::vector<FoldResult> folds;
    std::vector<std::pair<std::string, AggregateEntry>> aggregate; // display order

    nlohmann::ordered_json to_json() const;
};

// Metric display order per task.
const std::vector<std::string>& metric_names(TaskKind task);

// "69.9(3.5)" for percentage metrics, "0.1464(0.0020)" for raw ones.
std::string format_mean_std(double mean, double stddev, bool percentage);

// Seeded stratified split: subjects are shuffled per class and dealt to
// folds through one continuing cursor, so class remainders spread out.
// Regression uses a single shuffled round-robin. Returns fold index per
// subject.
std::vector<int> assign_folds(const std::vector<Target>& targets, TaskKind task,
                              int n_folds, std::uint64_t seed);

// 5-fold cross-validation: fine-tune on the training folds, score the
// held-out fold, aggregate mean/std per metric.
EvalReport cross_validate(const std::vector<BrainGraph>& graphs,
                          const std::vector<Target>& targets, const TrainConfig& cfg,
                          const Checkpoint* init, int n_folds = 5,
                          double threshold = 0.5);

// Positive-class (index 1) softmax probability for a classification model,
// or the raw head output for regression.
double predict_score(const BrainGraph& g, const ParamSet& params, TaskKind task,
                     bool use_mask);

struct EdgeAttribution {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0; // |effective mask - initial mask value|
};

// Top-k off-diagonal pairs ranked by how far fine-tuning moved the
// symmetrized mask away from its initial value, ties broken by (i, j).
std::vector<EdgeAttribution> top_k_edges(const Tensor& mask_logits, std::size_t k);

} // namespace tga
