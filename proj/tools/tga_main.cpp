// tga: topology-aware graph augmentation toolkit for functional connectomes.
//
// Subcommands: synth, pretrain, finetune, cv, evaluate, biomarkers.
// Exit codes: 0 success, 2 config/flag error, 3 data error, 4 numeric
// divergence, 5 capability mismatch. Errors are reported as one JSON object
// on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include "tga/checkpoint.hpp"
#include "tga/config.hpp"
#include "tga/dataset.hpp"
#include "tga/errors.hpp"
#include "tga/eval.hpp"
#include "tga/graphs.hpp"
#include "tga/synthdata.hpp"
#include "tga/train.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::ordered_json;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> alpha;
    std::optional<double> beta;
    bool naive = false;
    bool freeze_encoder = false;
    bool no_mask = false;
    int threads = 0;
};

void add_override_flags(CLI::App* cmd, CommonFlags& flags, bool variant_flags) {
    cmd->add_option("--seed", flags.seed, "Override config seed");
    cmd->add_option("--strategy", flags.strategy,
                    "Augmentation strategy: hnd, wer, uniform_node, uniform_edge");
    cmd->add_option("--alpha", flags.alpha, "Node drop ratio override");
    cmd->add_option("--beta", flags.beta, "Edge removal ratio override");
    cmd->add_option("--threads", flags.threads, "Cap OpenMP worker threads (0 = default)");
    if (variant_flags) {
        cmd->add_flag("--naive", flags.naive, "Train from scratch, ignore any checkpoint");
        cmd->add_flag("--freeze-encoder", flags.freeze_encoder,
                      "Keep encoder tensors fixed during fine-tuning");
        cmd->add_flag("--no-attention-mask", flags.no_mask,
                      "Disable the learnable attention mask");
    }
}

// flags > config file > defaults
tga::CliConfig resolve_config(const CommonFlags& flags, bool config_required) {
    tga::CliConfig cfg;
    if (!flags.config_path.empty())
        cfg = tga::load_config(flags.config_path);
    else if (config_required)
        throw tga::ConfigError("--config is required for this command");
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.strategy) cfg.augment.kind = tga::augment_kind_from_string(*flags.strategy);
    if (flags.alpha) cfg.augment.alpha = *flags.alpha;
    if (flags.beta) cfg.augment.beta = *flags.beta;
    if (flags.naive) cfg.naive = true;
    if (flags.freeze_encoder) cfg.freeze_encoder = true;
    if (flags.no_mask) cfg.use_mask = false;
    if (flags.threads != 0) cfg.threads = flags.threads;
    cfg.validate();
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw tga::DataError("cannot write " + path.string());
    f << content;
    if (!f) throw tga::DataError("short write to " + path.string());
}

tga::TaskKind require_task_match(const tga::CliConfig& cfg, const tga::Manifest& manifest) {
    if (manifest.task == "pretext")
        throw tga::DataError("manifest is an unlabeled pretext cohort, expected " +
                             tga::to_string(cfg.task) + " targets");
    const tga::TaskKind manifest_task = tga::task_kind_from_string(manifest.task);
    if (manifest_task != cfg.task)
        throw tga::ConfigError("config task is " + tga::to_string(cfg.task) +
                               " but the manifest is " + manifest.task);
    return manifest_task;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---- subcommand bodies ----

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const tga::SynthSpec spec = tga::load_synth_spec(spec_path);
    const tga::Manifest manifest = tga::generate_cohort(spec, out_dir);
    std::cout << "wrote " << manifest.subjects.size() << " subjects to " << out_dir
              << " (manifest.json included)\n";
    return 0;
}

int run_pretrain(const CommonFlags& flags, const std::string& manifest_path,
                 const std::string& out_path, std::string trace_path) {
    const tga::CliConfig cfg = resolve_config(flags, true);
    const tga::Manifest manifest = tga::load_manifest(manifest_path);
    const tga::Cohort cohort = tga::load_cohort(manifest);

    const tga::PretrainResult result = tga::pretrain(cohort.graphs, cfg.pretrain_config());

    ordered_json echo = tga::config_to_json(cfg);
    echo["stage"] = "pretext";
    echo["n_rois"] = manifest.n_rois;
    tga::save_checkpoint(tga::Checkpoint::from_params(result.params, cfg.seed, echo),
                         out_path);

    if (trace_path.empty()) trace_path = out_path + ".trace.json";
    ordered_json trace;
    trace["config"] = tga::config_to_json(cfg);
    trace["seed"] = cfg.seed;
    trace["n_subjects"] = cohort.graphs.size();
    trace["epoch_mean_loss"] = result.epoch_mean_loss;
    trace["step_loss"] = result.step_loss;
    write_text(trace_path, trace.dump(2) + "\n");

    std::cout << "pretrained on " << cohort.graphs.size() << " subjects for "
              << cfg.pretrain_epochs << " epochs";
    if (!result.epoch_mean_loss.empty())
        std::cout << ", final mean loss " << format_double(result.epoch_mean_loss.back());
    std::cout << "\ncheckpoint: " << out_path << "\ntrace: " << trace_path << "\n";
    return 0;
}

tga::FinetuneResult finetune_from_files(const tga::CliConfig& cfg,
                                        const std::string& manifest_path,
                                        const std::string& init_path,
                                        tga::TaskKind* task_out,
                                        std::size_t* n_rois_out) {
    if (cfg.naive && !init_path.empty())
        throw tga::ConfigError("conflicting flags: --naive forbids --init");
    const tga::Manifest manifest = tga::load_manifest(manifest_path);
    require_task_match(cfg, manifest);
    const tga::Cohort cohort = tga::load_cohort(manifest);

    std::optional<tga::Checkpoint> init;
    if (!init_path.empty()) init = tga::load_checkpoint(init_path);

    if (task_out) *task_out = cfg.task;
    if (n_rois_out) *n_rois_out = manifest.n_rois;
    return tga::finetune(cohort.graphs, cohort.targets, init ? &*init : nullptr,
                         cfg.finetune_config());
}

int run_finetune(const CommonFlags& flags, const std::string& manifest_path,
                 const std::string& init_path, const std::string& out_path) {
    const tga::CliConfig cfg = resolve_config(flags, true);
    tga::TaskKind task = cfg.task;
    std::size_t n_rois = 0;
    const tga::FinetuneResult result =
        finetune_from_files(cfg, manifest_path, init_path, &task, &n_rois);

    ordered_json echo = tga::config_to_json(cfg);
    echo["stage"] = "task";
    echo["n_rois"] = n_rois;
    echo["n_outputs"] = result.n_outputs;
    if (task == tga::TaskKind::regression) {
        echo["target_min"] = result.target_min;
        echo["target_max"] = result.target_max;
    }
    tga::save_checkpoint(tga::Checkpoint::from_params(result.params, cfg.seed, echo),
                         out_path);
    std::cout << "fine-tuned " << tga::to_string(task) << " model written to " << out_path
              << "\n";
    return 0;
}

int run_cv(const CommonFlags& flags, const std::string& manifest_path,
           const std::string& init_path, const std::string& out_path) {
    const tga::CliConfig cfg = resolve_config(flags, true);
    if (cfg.naive && !init_path.empty())
        throw tga::ConfigError("conflicting flags: --naive forbids --init");
    const tga::Manifest manifest = tga::load_manifest(manifest_path);
    require_task_match(cfg, manifest);
    const tga::Cohort cohort = tga::load_cohort(manifest);

    std::optional<tga::Checkpoint> init;
    if (!init_path.empty()) init = tga::load_checkpoint(init_path);

    tga::EvalReport report =
        tga::cross_validate(cohort.graphs, cohort.targets, cfg.finetune_config(),
                            init ? &*init : nullptr, cfg.folds, cfg.threshold);
    report.config_echo = tga::config_to_json(cfg);
    write_text(out_path, report.to_json().dump(2) + "\n");

    for (const auto& [name, agg] : report.aggregate)
        std::cout << name << ": " << agg.formatted << "\n";
    std::cout << "report: " << out_path << "\n";
    return 0;
}

int run_evaluate(const CommonFlags& flags, const std::string& manifest_path,
                 const std::string& model_path, const std::string& out_path) {
    const tga::CliConfig cfg = resolve_config(flags, false);
    const tga::Checkpoint ckpt = tga::load_checkpoint(model_path);
    if (!ckpt.has("head.w1"))
        throw tga::CapabilityError(
            "checkpoint " + model_path +
            " has no prediction head; evaluate needs a fine-tuned task model");
    const tga::ParamSet params = tga::params_from_checkpoint(ckpt);
    const bool use_mask = ckpt.has("mask.logits");
    const tga::TaskKind task =
        tga::task_kind_from_string(ckpt.config_echo.value("task", "classification"));

    const tga::Manifest manifest = tga::load_manifest(manifest_path);
    if (manifest.task != tga::to_string(task))
        throw tga::DataError("model predicts " + tga::to_string(task) +
                             " but the manifest is " + manifest.task);
    const tga::Cohort cohort = tga::load_cohort(manifest);

    tga::MetricMap metrics;
    if (task == tga::TaskKind::classification) {
        std::vector<int> labels;
        std::vector<double> scores;
        for (std::size_t i = 0; i < cohort.graphs.size(); ++i) {
            labels.push_back(static_cast<int>(cohort.targets[i].label));
            scores.push_back(
                tga::predict_score(cohort.graphs[i], params, task, use_mask));
        }
        for (const auto& [name, value] :
             tga::classification_metrics(labels, scores, cfg.threshold))
            metrics[name] = 100.0 * value;
    } else {
        if (!ckpt.config_echo.contains("target_min"))
            throw tga::DataError("regression checkpoint lacks target normalization stats");
        const double lo = ckpt.config_echo.at("target_min").get<double>();
        const double hi = ckpt.config_echo.at("target_max").get<double>();
        std::vector<double> targets, preds;
        for (std::size_t i = 0; i < cohort.graphs.size(); ++i) {
            targets.push_back((cohort.targets[i].score - lo) / (hi - lo));
            preds.push_back(tga::predict_score(cohort.graphs[i], params, task, use_mask));
        }
        metrics = tga::regression_metrics(targets, preds);
    }

    ordered_json doc;
    doc["config"] = tga::config_to_json(cfg);
    doc["model"] = model_path;
    doc["model_config"] = ckpt.config_echo;
    ordered_json mj;
    for (const std::string& name : tga::metric_names(task)) mj[name] = metrics.at(name);
    doc["metrics"] = std::move(mj);
    write_text(out_path, doc.dump(2) + "\n");

    const bool percentage = task == tga::TaskKind::classification;
    for (const std::string& name : tga::metric_names(task)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, percentage ? "%.1f" : "%.4f", metrics.at(name));
        std::cout << name << ": " << buf << "\n";
    }
    return 0;
}

int run_biomarkers(const std::string& model_path, std::size_t k,
                   const std::string& out_path, std::string edge_list_path) {
    const tga::Checkpoint ckpt = tga::load_checkpoint(model_path);
    const tga::Tensor* logits = ckpt.find("mask.logits");
    if (logits == nullptr)
        throw tga::CapabilityError(
            "checkpoint " + model_path +
            " was trained without the attention mask (no-attention-mask variant), "
            "so it carries no edge attributions");

    const std::vector<tga::EdgeAttribution> edges = tga::top_k_edges(*logits, k);

    ordered_json arr = ordered_json::array();
    std::string txt;
    for (const tga::EdgeAttribution& e : edges) {
        arr.push_back({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
        txt += std::to_string(e.i) + " " + std::to_string(e.j) + " " +
               format_double(e.weight) + "\n";
    }
    write_text(out_path, arr.dump(2) + "\n");
    if (edge_list_path.empty())
        edge_list_path = std::filesystem::path(out_path).replace_extension(".txt").string();
    write_text(edge_list_path, txt);
    std::cout << "wrote " << edges.size() << " edges to " << out_path << " and "
              << edge_list_path << "\n";
    return 0;
}

int report_error(const char* code, const std::string& message, int exit_code) {
    ordered_json err;
    err["error"] = {{"code", code}, {"message", message}};
    std::cerr << err.dump() << "\n";
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware graph augmentation toolkit for brain connectomes"};
    app.require_subcommand(1);

    CommonFlags flags;

    // synth
    std::string spec_path, out_dir;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic fMRI cohort");
    synth->add_option("--spec", spec_path, "Synth spec JSON")->required();
    synth->add_option("--out", out_dir, "Output directory")->required();

    // pretrain
    std::string manifest_path, out_path, trace_path, init_path, model_path, edge_list_path;
    CLI::App* pretrain = app.add_subcommand("pretrain", "Self-supervised pretext training");
    pretrain->add_option("--config", flags.config_path, "Config JSON")->required();
    pretrain->add_option("--manifest", manifest_path, "Cohort manifest")->required();
    pretrain->add_option("--out", out_path, "Checkpoint output path")->required();
    pretrain->add_option("--trace", trace_path, "Loss trace JSON path");
    add_override_flags(pretrain, flags, false);

    // finetune
    CLI::App* finetune = app.add_subcommand("finetune", "Fine-tune a task model");
    finetune->add_option("--config", flags.config_path, "Config JSON")->required();
    finetune->add_option("--manifest", manifest_path, "Labeled manifest")->required();
    finetune->add_option("--init", init_path, "Pretext checkpoint to initialize from");
    finetune->add_option("--out", out_path, "Model output path")->required();
    add_override_flags(finetune, flags, true);

    // cv
    CLI::App* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    cv->add_option("--config", flags.config_path, "Config JSON")->required();
    cv->add_option("--manifest", manifest_path, "Labeled manifest")->required();
    cv->add_option("--init", init_path, "Pretext checkpoint to initialize from");
    cv->add_option("--out", out_path, "Report JSON path")->required();
    add_override_flags(cv, flags, true);

    // evaluate
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a saved model on a cohort");
    evaluate->add_option("--config", flags.config_path, "Config JSON");
    evaluate->add_option("--manifest", manifest_path, "Labeled manifest")->required();
    evaluate->add_option("--model", model_path, "Fine-tuned model checkpoint")->required();
    evaluate->add_option("--out", out_path, "Metrics JSON path")->required();
    evaluate->add_option("--threads", flags.threads, "Cap OpenMP worker threads");

    // biomarkers
    std::size_t top_k = 10;
    CLI::App* biomarkers =
        app.add_subcommand("biomarkers", "Extract top-k discriminative connectivities");
    biomarkers->add_option("--model", model_path, "Fine-tuned model checkpoint")->required();
    biomarkers->add_option("--k", top_k, "Number of edges (default 10)");
    biomarkers->add_option("--out", out_path, "Edge JSON path")->required();
    biomarkers->add_option("--edge-list", edge_list_path,
                           "Plain-text edge list path (default: --out with .txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("config", e.what(), 2);
    }

    try {
        if (app.got_subcommand(synth)) return run_synth(spec_path, out_dir);
        if (app.got_subcommand(pretrain))
            return run_pretrain(flags, manifest_path, out_path, trace_path);
        if (app.got_subcommand(finetune))
            return run_finetune(flags, manifest_path, init_path, out_path);
        if (app.got_subcommand(cv)) return run_cv(flags, manifest_path, init_path, out_path);
        if (app.got_subcommand(evaluate))
            return run_evaluate(flags, manifest_path, model_path, out_path);
        if (app.got_subcommand(biomarkers))
            return run_biomarkers(model_path, top_k, out_path, edge_list_path);
    } catch (const tga::ConfigError& e) {
        return report_error("config", e.what(), 2);
    } catch (const tga::BadMagicError& e) {
        return report_error("bad_magic", e.what(), 3);
    } catch (const tga::VersionMismatchError& e) {
        return report_error("version_mismatch", e.what(), 3);
    } catch (const tga::TruncatedPayloadError& e) {
        return report_error("truncated_payload", e.what(), 3);
    } catch (const tga::DataError& e) {
        return report_error("data", e.what(), 3);
    } catch (const tga::DivergedError& e) {
        return report_error("diverged", e.what(), 4);
    } catch (const tga::CapabilityError& e) {
        return report_error("capability", e.what(), 5);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 1);
    }
    return 0;
}
