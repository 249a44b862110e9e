#include "tga/train.hpp"

#include "tga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tga {

// Slack for the [-2, 0] loss bound: a cosine of two bitwise-equal vectors can
// exceed 1 by a few ulps.
static constexpr double kLossSlack = 1e-9;

void TrainConfig::validate() const {
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
    strategy.validate();
}

static std::size_t shared_roi_count(const std::vector<BrainGraph>& graphs) {
    const std::size_t n = graphs.front().adjacency.rows();
    for (const BrainGraph& g : graphs)
        if (g.adjacency.rows() != n)
            throw DataError("subject " + g.subject_id + " has " +
                            std::to_string(g.adjacency.rows()) +
                            " ROIs, cohort expects " + std::to_string(n));
    return n;
}

PretrainResult pretrain(const std::vector<BrainGraph>& cohort, const TrainConfig& cfg) {
    cfg.validate();
    if (cohort.empty()) throw DataError("pretraining cohort is empty");
    const std::size_t n_rois = shared_roi_count(cohort);

    PretrainResult res{init_pretext_params(n_rois, cfg.seed), {}, {}};
    const AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};

    std::vector<std::uint64_t> subject_keys(cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i)
        subject_keys[i] = hash_str(cohort[i].subject_id);

    std::vector<std::size_t> order(cohort.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        RngStream shuffle_rng =
            RngStream::derive(cfg.seed, "pretrain.shuffle", static_cast<std::uint64_t>(epoch));
        shuffle(order, shuffle_rng);

        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double scale = 1.0 / static_cast<double>(stop - start);

            double batch_sum = 0.0;
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t idx = order[b];
                const auto [v1, v2] =
                    make_views(cohort[idx], cfg.strategy, cfg.seed, subject_keys[idx],
                               static_cast<std::uint64_t>(epoch));
                const double loss = pretext_loss_and_grad(v1, v2, res.params, scale);
                if (!std::isfinite(loss))
                    throw DivergedError("nonfinite contrastive loss at epoch " +
                                        std::to_string(epoch));
                if (loss < -2.0 - kLossSlack || loss > kLossSlack)
                    throw DivergedError("contrastive loss " + std::to_string(loss) +
                                        " outside [-2, 0] at epoch " +
                                        std::to_string(epoch));
                batch_sum += loss;
                epoch_sum += loss;
            }
            res.step_loss.push_back(batch_sum * scale);
            adam_step(res.params, adam);
        }
        res.epoch_mean_loss.push_back(epoch_sum / static_cast<double>(cohort.size()));
    }
    return res;
}

FinetuneResult finetune(const std::vector<BrainGraph>& graphs,
                        const std::vector<Target>& targets, const Checkpoint* init,
                        const TrainConfig& cfg) {
    cfg.validate();
    if (graphs.empty()) throw DataError("fine-tuning set is empty");
    if (graphs.size() != targets.size())
        throw DataError("got " + std::to_string(graphs.size()) + " graphs but " +
                        std::to_string(targets.size()) + " targets");
    if (!cfg.naive && init == nullptr)
        throw ConfigError("finetune requires an init checkpoint unless naive is set");
    const std::size_t n_rois = shared_roi_count(graphs);

    FinetuneResult res;
    std::vector<Target> work = targets;
    if (cfg.task == TaskKind::classification) {
        std::size_t n_classes = 0;
        for (const Target& t : targets) n_classes = std::max(n_classes, t.label + 1);
        if (n_classes < 2)
            throw DataError("classification needs at least 2 classes, found " +
                            std::to_string(n_classes));
        res.n_outputs = n_classes;
    } else {
        res.n_outputs = 1;
        double lo = targets.front().score, hi = targets.front().score;
        for (const Target& t : targets) {
            lo = std::min(lo, t.score);
            hi = std::max(hi, t.score);
        }
        if (!(hi > lo))
            throw DataError("regression targets are constant, cannot normalize");
        res.target_min = lo;
        res.target_max = hi;
        for (Target& t : work) t.score = (t.score - lo) / (hi - lo);
    }

    res.params = init_task_params(n_rois, res.n_outputs, cfg.use_mask, cfg.seed);
    if (!cfg.naive && init != nullptr) {
        for (const char* name : {"encoder.w0", "encoder.w1"}) {
            const Tensor* t = init->find(name);
            if (t == nullptr)
                throw DataError(std::string("init checkpoint lacks tensor ") + name);
            Tensor& dst = res.params.at(name).value;
            if (!t->same_shape(dst))
                throw DataError(std::string(name) + " in init checkpoint is " +
                                t->shape_str() + ", cohort needs " + dst.shape_str());
            dst = *t;
        }
    }
    if (cfg.freeze_encoder) {
        res.params.at("encoder.w0").trainable = false;
        res.params.at("encoder.w1").trainable = false;
    }

    const AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};
    std::vector<std::size_t> order(graphs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        RngStream shuffle_rng =
            RngStream::derive(cfg.seed, "finetune.shuffle", static_cast<std::uint64_t>(epoch));
        shuffle(order, shuffle_rng);

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t idx = order[b];
                const double loss = task_loss_and_grad(graphs[idx], work[idx], cfg.task,
                                                       res.params, cfg.use_mask, scale);
                if (!std::isfinite(loss))
                    throw DivergedError("nonfinite task loss at epoch " +
                                        std::to_string(epoch));
            }
            adam_step(res.params, adam);
        }
    }
    return res;
}

ParamSet params_from_checkpoint(const Checkpoint& ckpt) {
    ParamSet p;
    for (const auto& [name, tensor] : ckpt.tensors) p.add(name, tensor);
    return p;
}

} // namespace tga
