#include "tga/dataset.hpp"

#include "tga/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace tga {

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }

    Manifest m;
    try {
        m.n_rois = doc.at("n_rois").get<std::size_t>();
        m.task = doc.at("task").get<std::string>();
        for (const auto& s : doc.at("subjects")) {
            SubjectRecord rec;
            rec.id = s.at("id").get<std::string>();
            rec.path = s.at("path").get<std::string>();
            if (s.contains("label")) rec.label = s.at("label").get<int>();
            if (s.contains("score")) rec.score = s.at("score").get<double>();
            m.subjects.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + " is malformed: " + e.what());
    }
    if (m.task != "classification" && m.task != "regression" && m.task != "pretext")
        throw DataError("manifest " + path.string() + " has unknown task '" + m.task + "'");
    if (m.subjects.empty())
        throw DataError("manifest " + path.string() + " lists no subjects");
    m.base_dir = path.parent_path();
    return m;
}

Cohort load_cohort(const Manifest& manifest) {
    Cohort cohort;
    cohort.graphs.resize(manifest.subjects.size());

    // Subjects are independent; build graphs in parallel but keep manifest
    // order. Exceptions cannot cross the parallel region, so remember the
    // first failure and rethrow after.
    std::string first_error;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(manifest.subjects.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const SubjectRecord& rec = manifest.subjects[static_cast<std::size_t>(i)];
        try {
            std::filesystem::path p(rec.path);
            if (p.is_relative()) p = manifest.base_dir / p;
            const TimeSeries ts = load_time_series_csv(p, rec.id);
            if (ts.data.cols() != manifest.n_rois)
                throw DataError("subject " + rec.id + " has " +
                                std::to_string(ts.data.cols()) + " columns, manifest says " +
                                std::to_string(manifest.n_rois));
            cohort.graphs[static_cast<std::size_t>(i)] = build_graph(ts);
        } catch (const std::exception& e) {
#pragma omp critical
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) throw DataError(first_error);

    if (manifest.task == "pretext") return cohort;

    cohort.targets.resize(manifest.subjects.size());
    for (std::size_t i = 0; i < manifest.subjects.size(); ++i) {
        const SubjectRecord& rec = manifest.subjects[i];
        if (manifest.task == "classification") {
            if (!rec.label)
                throw DataError("subject " + rec.id + " is missing a label");
            if (*rec.label < 0)
                throw DataError("subject " + rec.id + " has a negative label");
            cohort.targets[i].label = static_cast<std::size_t>(*rec.label);
        } else {
            if (!rec.score)
                throw DataError("subject " + rec.id + " is missing a score");
            cohort.targets[i].score = *rec.score;
        }
    }
    return cohort;
}

} // namespace tga
