#include "tga/synthdata.hpp"

#include "tga/errors.hpp"
#include "tga/kernels.hpp"
#include "tga/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace tga {

void SynthSpec::validate() const {
    if (task != "classification" && task != "regression" && task != "pretext")
        throw ConfigError("synth task must be classification, regression or pretext, got '" +
                          task + "'");
    if (task == "pretext") {
        if (n_subjects < 1) throw ConfigError("n_subjects must be >= 1");
    } else if (n_per_class < 1) {
        throw ConfigError("n_per_class must be >= 1");
    }
    if (n_rois < 2) throw ConfigError("n_rois must be >= 2");
    if (t_points < 230)
        throw ConfigError("t_points must be >= 230 (cohort inclusion rule), got " +
                          std::to_string(t_points));
    if (!(base_rho > 0.0) || !(base_rho + boost_delta < 1.0))
        throw ConfigError("need 0 < base_rho and base_rho + boost_delta < 1");
    if (boost_delta < 0.0) throw ConfigError("boost_delta must be >= 0");
    if (!(noise_level > 0.0)) throw ConfigError("noise_level must be > 0");
    if (rho_jitter < 0.0) throw ConfigError("rho_jitter must be >= 0");
    if (task == "pretext") {
        if (!(base_rho - rho_jitter > 0.0) ||
            !(base_rho + rho_jitter + boost_delta < 1.0))
            throw ConfigError("pretext rho jitter pushes correlations outside (0, 1)");
    }

    const auto bl = resolved_blocks();
    if (designated_block < 0 || static_cast<std::size_t>(designated_block) >= bl.size())
        throw ConfigError("designated_block " + std::to_string(designated_block) +
                          " out of range for " + std::to_string(bl.size()) + " blocks");
    std::vector<int> seen(static_cast<std::size_t>(n_rois), 0);
    for (const auto& b : bl) {
        if (b.empty()) throw ConfigError("invalid block partition: empty block");
        for (int roi : b) {
            if (roi < 0 || roi >= n_rois)
                throw ConfigError("invalid block partition: ROI " + std::to_string(roi) +
                                  " out of range");
            seen[static_cast<std::size_t>(roi)] += 1;
        }
    }
    for (int roi = 0; roi < n_rois; ++roi)
        if (seen[static_cast<std::size_t>(roi)] != 1)
            throw ConfigError("invalid block partition: ROI " + std::to_string(roi) +
                              " appears " + std::to_string(seen[roi]) + " times");
    if (!(resolved_score_hi() > resolved_score_lo()))
        throw ConfigError("score map needs score_c_hi > score_c_lo");
}

std::vector<std::vector<int>> SynthSpec::resolved_blocks() const {
    if (!blocks.empty()) return blocks;
    std::vector<std::vector<int>> out(3);
    for (int roi = 0; roi < n_rois; ++roi)
        out[static_cast<std::size_t>(roi * 3 / n_rois)].push_back(roi);
    return out;
}

double SynthSpec::resolved_score_lo() const {
    return std::isnan(score_c_lo) ? base_rho - 0.1 : score_c_lo;
}

double SynthSpec::resolved_score_hi() const {
    return std::isnan(score_c_hi) ? base_rho + boost_delta + 0.1 : score_c_hi;
}

SynthSpec synth_spec_from_json(const nlohmann::json& doc) {
    static const char* known[] = {"task",        "n_per_class",   "n_subjects",
                                  "n_rois",      "t_points",      "blocks",
                                  "designated_block", "base_rho", "boost_delta",
                                  "noise_level", "rho_jitter",    "seed",
                                  "score_c_lo",  "score_c_hi"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&key](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("unknown key '" + key + "' in synth spec");
    }
    SynthSpec s;
    try {
        s.task = doc.value("task", s.task);
        s.n_per_class = doc.value("n_per_class", s.n_per_class);
        s.n_subjects = doc.value("n_subjects", s.n_subjects);
        s.n_rois = doc.value("n_rois", s.n_rois);
        s.t_points = doc.value("t_points", s.t_points);
        if (doc.contains("blocks"))
            s.blocks = doc.at("blocks").get<std::vector<std::vector<int>>>();
        s.designated_block = doc.value("designated_block", s.designated_block);
        s.base_rho = doc.value("base_rho", s.base_rho);
        s.boost_delta = doc.value("boost_delta", s.boost_delta);
        s.noise_level = doc.value("noise_level", s.noise_level);
        s.rho_jitter = doc.value("rho_jitter", s.rho_jitter);
        s.seed = doc.value("seed", s.seed);
        s.score_c_lo = doc.value("score_c_lo", s.score_c_lo);
        s.score_c_hi = doc.value("score_c_hi", s.score_c_hi);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed synth spec: ") + e.what());
    }
    s.validate();
    return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open synth spec " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("synth spec " + path.string() + " is not valid JSON: " +
                          e.what());
    }
    return synth_spec_from_json(doc);
}

nlohmann::ordered_json synth_spec_to_json(const SynthSpec& spec) {
    nlohmann::ordered_json j;
    j["task"] = spec.task;
    if (spec.task == "pretext")
        j["n_subjects"] = spec.n_subjects;
    else
        j["n_per_class"] = spec.n_per_class;
    j["n_rois"] = spec.n_rois;
    j["t_points"] = spec.t_points;
    j["blocks"] = spec.resolved_blocks();
    j["designated_block"] = spec.designated_block;
    j["base_rho"] = spec.base_rho;
    j["boost_delta"] = spec.boost_delta;
    j["noise_level"] = spec.noise_level;
    if (spec.task == "pretext") j["rho_jitter"] = spec.rho_jitter;
    if (spec.task == "regression") {
        j["score_c_lo"] = spec.resolved_score_lo();
        j["score_c_hi"] = spec.resolved_score_hi();
    }
    j["seed"] = spec.seed;
    return j;
}

namespace {

std::string format_csv_row(const double* row, std::size_t n) {
    std::string line;
    char buf[32];
    for (std::size_t j = 0; j < n; ++j) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[j]);
        if (j) line.push_back(',');
        line.append(buf, ptr);
    }
    line.push_back('\n');
    return line;
}

// Mean off-diagonal Pearson correlation within one ROI block.
double realized_block_correlation(const Tensor& data, const std::vector<int>& block) {
    const std::size_t t = data.rows();
    const std::size_t m = block.size();
    if (m < 2) return 1.0;
    Tensor sub(t, m);
    for (std::size_t r = 0; r < t; ++r)
        for (std::size_t c = 0; c < m; ++c)
            sub(r, c) = data(r, static_cast<std::size_t>(block[c]));
    std::vector<double> mean(m), inv_sd(m);
    Tensor corr(m, m);
    std::size_t bad = m;
    kernels::serial::pearson(sub.data(), t, m, mean.data(), inv_sd.data(), corr.data(),
                             1e-24, &bad);
    if (bad != m) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) sum += corr(i, j);
    return sum / static_cast<double>(m * (m - 1) / 2);
}

} // namespace

Manifest generate_cohort(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir.string());

    const auto blocks = spec.resolved_blocks();
    const std::size_t n = static_cast<std::size_t>(spec.n_rois);
    const std::size_t t = static_cast<std::size_t>(spec.t_points);
    const double sigma = spec.noise_level;
    const bool pretext = spec.task == "pretext";
    const std::size_t n_subjects = pretext ? static_cast<std::size_t>(spec.n_subjects)
                                           : 2 * static_cast<std::size_t>(spec.n_per_class);

    std::vector<std::size_t> block_of(n);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int roi : blocks[b]) block_of[static_cast<std::size_t>(roi)] = b;

    nlohmann::ordered_json subjects = nlohmann::ordered_json::array();
    Manifest manifest;
    manifest.n_rois = n;
    manifest.task = spec.task;
    manifest.base_dir = out_dir;

    for (std::size_t s = 0; s < n_subjects; ++s) {
        RngStream rng = RngStream::derive(spec.seed, "subject", s);

        // per-block correlation targets
        std::vector<double> rho(blocks.size(), spec.base_rho);
        int label = -1;
        if (pretext) {
            const double rho_s =
                spec.base_rho + spec.rho_jitter * (2.0 * rng.uniform() - 1.0);
            for (double& r : rho) r = rho_s;
            const std::size_t boosted = rng.below(blocks.size());
            rho[boosted] += spec.boost_delta * rng.uniform();
        } else {
            label = s < static_cast<std::size_t>(spec.n_per_class) ? 0 : 1;
            if (label == 1)
                rho[static_cast<std::size_t>(spec.designated_block)] += spec.boost_delta;
        }

        std::vector<double> sqrt_lambda(blocks.size()), noise_scale(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const double lambda =
                rho[b] * sigma * sigma / (1.0 - rho[b] + rho[b] * sigma * sigma);
            sqrt_lambda[b] = std::sqrt(lambda);
            noise_scale[b] = std::sqrt(1.0 - lambda) * sigma;
        }

        Tensor data(t, n);
        std::vector<double> factors(blocks.size());
        for (std::size_t r = 0; r < t; ++r) {
            for (std::size_t b = 0; b < blocks.size(); ++b) factors[b] = rng.normal();
            for (std::size_t roi = 0; roi < n; ++roi) {
                const std::size_t b = block_of[roi];
                data(r, roi) = sqrt_lambda[b] * factors[b] + noise_scale[b] * rng.normal();
            }
        }

        char idbuf[32];
        std::snprintf(idbuf, sizeof idbuf, "subj%04zu", s);
        const std::string id = idbuf;
        const std::string filename = id + ".csv";
        {
            std::ofstream out(out_dir / filename, std::ios::trunc);
            if (!out) throw DataError("cannot write " + (out_dir / filename).string());
            std::string body;
            body.reserve(t * n * 20);
            for (std::size_t r = 0; r < t; ++r)
                body += format_csv_row(data.data() + r * n, n);
            out << body;
            if (!out) throw DataError("short write to " + (out_dir / filename).string());
        }

        SubjectRecord rec;
        rec.id = id;
        rec.path = filename;
        nlohmann::ordered_json sj;
        sj["id"] = id;
        sj["path"] = filename;
        if (spec.task == "classification") {
            rec.label = label;
            sj["label"] = label;
        } else if (spec.task == "regression") {
            const double c = realized_block_correlation(
                data, blocks[static_cast<std::size_t>(spec.designated_block)]);
            const double lo = spec.resolved_score_lo(), hi = spec.resolved_score_hi();
            const double score = std::clamp((c - lo) / (hi - lo), 0.0, 1.0);
            rec.score = score;
            sj["score"] = score;
        }
        manifest.subjects.push_back(std::move(rec));
        subjects.push_back(std::move(sj));
    }

    nlohmann::ordered_json doc;
    doc["n_rois"] = n;
    doc["task"] = spec.task;
    doc["seed"] = spec.seed;
    doc["spec"] = synth_spec_to_json(spec);
    doc["subjects"] = std::move(subjects);
    std::ofstream mf(out_dir / "manifest.json", std::ios::trunc);
    if (!mf) throw DataError("cannot write " + (out_dir / "manifest.json").string());
    mf << doc.dump(2) << '\n';

    return manifest;
}

} // namespace tga
