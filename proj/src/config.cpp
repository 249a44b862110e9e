#include "tga/config.hpp"

#include "tga/errors.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

namespace tga {

void CliConfig::validate() const {
    augment.validate();
    pretrain_config().validate();
    finetune_config().validate();
    if (folds < 2) throw ConfigError("eval.folds must be >= 2");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("eval.threshold must lie in (0, 1)");
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

TrainConfig CliConfig::pretrain_config() const {
    TrainConfig t;
    t.epochs = pretrain_epochs;
    t.batch_size = pretrain_batch_size;
    t.lr = pretrain_lr;
    t.seed = seed;
    t.strategy = augment;
    t.task = task;
    return t;
}

TrainConfig CliConfig::finetune_config() const {
    TrainConfig t;
    t.epochs = finetune_epochs;
    t.batch_size = finetune_batch_size;
    t.lr = finetune_lr;
    t.seed = seed;
    t.strategy = augment;
    t.task = task;
    t.naive = naive;
    t.freeze_encoder = freeze_encoder;
    t.use_mask = use_mask;
    return t;
}

namespace {

void reject_unknown(const nlohmann::json& obj, const char* where,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&key](const char* k) { return key == k; }) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

} // namespace

CliConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, "config",
                   {"seed", "task", "augment", "pretrain", "finetune", "eval", "threads"});

    CliConfig cfg;
    try {
        cfg.seed = doc.value("seed", cfg.seed);
        if (doc.contains("task")) cfg.task = task_kind_from_string(doc.at("task"));
        if (doc.contains("augment")) {
            const auto& a = doc.at("augment");
            reject_unknown(a, "config.augment", {"kind", "alpha", "beta"});
            if (a.contains("kind"))
                cfg.augment.kind = augment_kind_from_string(a.at("kind"));
            cfg.augment.alpha = a.value("alpha", cfg.augment.alpha);
            cfg.augment.beta = a.value("beta", cfg.augment.beta);
        }
        if (doc.contains("pretrain")) {
            const auto& p = doc.at("pretrain");
            reject_unknown(p, "config.pretrain", {"epochs", "batch_size", "lr"});
            cfg.pretrain_epochs = p.value("epochs", cfg.pretrain_epochs);
            cfg.pretrain_batch_size = p.value("batch_size", cfg.pretrain_batch_size);
            cfg.pretrain_lr = p.value("lr", cfg.pretrain_lr);
        }
        if (doc.contains("finetune")) {
            const auto& f = doc.at("finetune");
            reject_unknown(f, "config.finetune",
                           {"epochs", "batch_size", "lr", "naive", "freeze_encoder",
                            "use_mask"});
            cfg.finetune_epochs = f.value("epochs", cfg.finetune_epochs);
            cfg.finetune_batch_size = f.value("batch_size", cfg.finetune_batch_size);
            cfg.finetune_lr = f.value("lr", cfg.finetune_lr);
            cfg.naive = f.value("naive", cfg.naive);
            cfg.freeze_encoder = f.value("freeze_encoder", cfg.freeze_encoder);
            cfg.use_mask = f.value("use_mask", cfg.use_mask);
        }
        if (doc.contains("eval")) {
            const auto& e = doc.at("eval");
            reject_unknown(e, "config.eval", {"folds", "threshold"});
            cfg.folds = e.value("folds", cfg.folds);
            cfg.threshold = e.value("threshold", cfg.threshold);
        }
        cfg.threads = doc.value("threads", cfg.threads);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

nlohmann::ordered_json config_to_json(const CliConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["task"] = to_string(cfg.task);
    j["augment"] = {{"kind", to_string(cfg.augment.kind)},
                    {"alpha", cfg.augment.alpha},
                    {"beta", cfg.augment.beta}};
    j["pretrain"] = {{"epochs", cfg.pretrain_epochs},
                     {"batch_size", cfg.pretrain_batch_size},
                     {"lr", cfg.pretrain_lr}};
    j["finetune"] = {{"epochs", cfg.finetune_epochs},
                     {"batch_size", cfg.finetune_batch_size},
                     {"lr", cfg.finetune_lr},
                     {"naive", cfg.naive},
                     {"freeze_encoder", cfg.freeze_encoder},
                     {"use_mask", cfg.use_mask}};
    j["eval"] = {{"folds", cfg.folds}, {"threshold", cfg.threshold}};
    j["threads"] = cfg.threads;
    return j;
}

} // namespace tga
