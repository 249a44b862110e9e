#include "tga/eval.hpp"

#include "tga/augment.hpp"
#include "tga/errors.hpp"
#include "tga/ops.hpp"
#include "tga/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace tga {

MetricMap classification_metrics(const std::vector<int>& labels,
                                 const std::vector<double>& scores, double threshold) {
    if (labels.size() != scores.size())
        throw DataError("classification_metrics: " + std::to_string(labels.size()) +
                        " labels vs " + std::to_string(scores.size()) + " scores");
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) {
        if (l != 0 && l != 1)
            throw DataError("classification_metrics: labels must be 0 or 1, got " +
                            std::to_string(l));
        (l == 1 ? n_pos : n_neg) += 1;
    }
    if (n_pos == 0 || n_neg == 0)
        throw DataError("undefined metrics AUC/SEN/SPE: only one class present");

    // AUC via midranks: rank-sum of positives minus its minimum, over the
    // number of (pos, neg) pairs. Ranks are half-integers, so this is exact.
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k] == 1) rank_sum_pos += rank[k];
    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    const double auc = u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));

    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const bool pred_pos = scores[k] >= threshold;
        if (labels[k] == 1)
            (pred_pos ? tp : fn) += 1;
        else
            (pred_pos ? fp : tn) += 1;
    }
    const double sen = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double spe = static_cast<double>(tn) / static_cast<double>(tn + fp);

    MetricMap m;
    m["AUC"] = auc;
    m["ACC"] = static_cast<double>(tp + tn) / static_cast<double>(n);
    m["SEN"] = sen;
    m["SPE"] = spe;
    m["BAC"] = 0.5 * (sen + spe);
    return m;
}

MetricMap regression_metrics(const std::vector<double>& targets,
                             const std::vector<double>& preds) {
    if (targets.size() != preds.size())
        throw DataError("regression_metrics: " + std::to_string(targets.size()) +
                        " targets vs " + std::to_string(preds.size()) + " predictions");
    const std::size_t n = targets.size();
    if (n < 2) throw DataError("regression_metrics needs at least 2 points");

    double mae = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = preds[i] - targets[i];
        mae += std::abs(d);
        mse += d * d;
    }
    mae /= static_cast<double>(n);
    mse /= static_cast<double>(n);

    // Pearson correlation with population normalization, matching
    // pearson_matrix.
    double mt = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += targets[i];
        mp += preds[i];
    }
    mt /= static_cast<double>(n);
    mp /= static_cast<double>(n);
    double cov = 0.0, vt = 0.0, vp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (targets[i] - mt) * (preds[i] - mp);
        vt += (targets[i] - mt) * (targets[i] - mt);
        vp += (preds[i] - mp) * (preds[i] - mp);
    }
    if (!(vt > 0.0)) throw DataError("undefined metric PCC: zero target variance");

    MetricMap m;
    m["MAE"] = mae;
    m["MSE"] = mse;
    m["PCC"] = vp > 0.0 ? cov / std::sqrt(vt * vp) : 0.0;
    return m;
}

const std::vector<std::string>& metric_names(TaskKind task) {
    static const std::vector<std::string> cls{"AUC", "ACC", "SEN", "SPE", "BAC"};
    static const std::vector<std::string> reg{"MAE", "MSE", "PCC"};
    return task == TaskKind::classification ? cls : reg;
}

std::string format_mean_std(double mean, double stddev, bool percentage) {
    char buf[64];
    if (percentage)
        std::snprintf(buf, sizeof buf, "%.1f(%.1f)", mean, stddev);
    else
        std::snprintf(buf, sizeof buf, "%.4f(%.4f)", mean, stddev);
    return buf;
}

std::vector<int> assign_folds(const std::vector<Target>& targets, TaskKind task,
                              int n_folds, std::uint64_t seed) {
    const std::size_t n = targets.size();
    std::vector<int> fold(n, -1);

    if (task == TaskKind::classification) {
        std::size_t n_classes = 0;
        for (const Target& t : targets) n_classes = std::max(n_classes, t.label + 1);
        int cursor = 0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (targets[i].label == c) members.push_back(i);
            if (members.size() < static_cast<std::size_t>(n_folds))
                throw DataError("class " + std::to_string(c) + " has only " +
                                std::to_string(members.size()) + " subjects, need >= " +
                                std::to_string(n_folds) + " for stratified folds");
            RngStream rng = RngStream::derive(seed, "folds", c);
            shuffle(members, rng);
            for (std::size_t i : members) {
                fold[i] = cursor;
                cursor = (cursor + 1) % n_folds;
            }
        }
    } else {
        std::vector<std::size_t> members(n);
        std::iota(members.begin(), members.end(), 0);
        RngStream rng = RngStream::derive(seed, "folds", 0);
        shuffle(members, rng);
        int cursor = 0;
        for (std::size_t i : members) {
            fold[i] = cursor;
            cursor = (cursor + 1) % n_folds;
        }
    }
    return fold;
}

double predict_score(const BrainGraph& g, const ParamSet& params, TaskKind task,
                     bool use_mask) {
    const Tensor out = predict(g, params, use_mask);
    if (task == TaskKind::regression) return out[0];
    if (out.size() < 2)
        throw DataError("classification model produces " + std::to_string(out.size()) +
                        " outputs, need at least 2");
    // softmax probability of the positive class (index 1)
    double mx = out[0];
    for (std::size_t i = 1; i < out.size(); ++i) mx = std::max(mx, out[i]);
    double denom = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) denom += std::exp(out[i] - mx);
    return std::exp(out[1] - mx) / denom;
}

EvalReport cross_validate(const std::vector<BrainGraph>& graphs,
                          const std::vector<Target>& targets, const TrainConfig& cfg,
                          const Checkpoint* init, int n_folds, double threshold) {
    if (n_folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (graphs.size() != targets.size())
        throw DataError("cross_validate: " + std::to_string(graphs.size()) +
                        " graphs vs " + std::to_string(targets.size()) + " targets");

    const std::vector<int> fold_of = assign_folds(targets, cfg.task, n_folds, cfg.seed);

    EvalReport report;
    report.seed = cfg.seed;
    report.task = cfg.task;

    for (int k = 0; k < n_folds; ++k) {
        std::vector<BrainGraph> train_graphs;
        std::vector<Target> train_targets;
        std::vector<std::size_t> held_out;
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            if (fold_of[i] == k) {
                held_out.push_back(i);
            } else {
                train_graphs.push_back(graphs[i]);
                train_targets.push_back(targets[i]);
            }
        }

        TrainConfig fold_cfg = cfg;
        fold_cfg.seed = RngStream::derive(cfg.seed, "fold", static_cast<std::uint64_t>(k))
                            .next_u64();
        const FinetuneResult model =
            finetune(train_graphs, train_targets, init, fold_cfg);

        FoldResult fr;
        fr.fold_index = k;
        if (cfg.task == TaskKind::classification) {
            std::vector<int> labels;
            std::vector<double> scores;
            for (std::size_t i : held_out) {
                labels.push_back(static_cast<int>(targets[i].label));
                scores.push_back(
                    predict_score(graphs[i], model.params, cfg.task, cfg.use_mask));
            }
            for (const auto& [name, value] :
                 classification_metrics(labels, scores, threshold))
                fr.metrics[name] = 100.0 * value;
        } else {
            std::vector<double> norm_targets, preds;
            const double span = model.target_max - model.target_min;
            for (std::size_t i : held_out) {
                norm_targets.push_back((targets[i].score - model.target_min) / span);
                preds.push_back(
                    predict_score(graphs[i], model.params, cfg.task, cfg.use_mask));
            }
            fr.metrics = regression_metrics(norm_targets, preds);
        }
        report.folds.push_back(std::move(fr));
    }

    const bool percentage = cfg.task == TaskKind::classification;
    for (const std::string& name : metric_names(cfg.task)) {
        AggregateEntry agg;
        double sum = 0.0;
        for (const FoldResult& fr : report.folds) sum += fr.metrics.at(name);
        agg.mean = sum / static_cast<double>(n_folds);
        double ss = 0.0;
        for (const FoldResult& fr : report.folds) {
            const double d = fr.metrics.at(name) - agg.mean;
            ss += d * d;
        }
        agg.stddev = std::sqrt(ss / static_cast<double>(n_folds - 1));
        agg.formatted = format_mean_std(agg.mean, agg.stddev, percentage);
        report.aggregate.emplace_back(name, std::move(agg));
    }
    return report;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["config"] = config_echo;
    doc["seed"] = seed;
    doc["task"] = tga::to_string(task);
    nlohmann::ordered_json folds_json = nlohmann::ordered_json::array();
    for (const FoldResult& fr : folds) {
        nlohmann::ordered_json fj;
        fj["fold_index"] = fr.fold_index;
        nlohmann::ordered_json metrics_json;
        for (const std::string& name : metric_names(task))
            metrics_json[name] = fr.metrics.at(name);
        fj["metrics"] = std::move(metrics_json);
        folds_json.push_back(std::move(fj));
    }
    doc["folds"] = std::move(folds_json);
    nlohmann::ordered_json agg_json;
    for (const auto& [name, entry] : aggregate) {
        agg_json[name] = {{"mean", entry.mean},
                          {"std", entry.stddev},
                          {"formatted", entry.formatted}};
    }
    doc["aggregate"] = std::move(agg_json);
    return doc;
}

std::vector<EdgeAttribution> top_k_edges(const Tensor& mask_logits, std::size_t k) {
    const std::size_t n = mask_logits.rows();
    if (k > pair_count(n))
        throw ConfigError("requested " + std::to_string(k) + " edges but the graph has " +
                          std::to_string(pair_count(n)) + " pairs");

    const Tensor meff = effective_mask(mask_logits);
    const double base = 1.0 / (1.0 + std::exp(-kMaskInitLogit));
    std::vector<EdgeAttribution> edges;
    edges.reserve(pair_count(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({i, j, std::abs(meff(i, j) - base)});
    std::sort(edges.begin(), edges.end(),
              [](const EdgeAttribution& a, const EdgeAttribution& b) {
                  if (a.weight != b.weight) return a.weight > b.weight;
                  if (a.i != b.i) return a.i < b.i;
                  return a.j < b.j;
              });
    edges.resize(k);
    return edges;
}

} // namespace tga
