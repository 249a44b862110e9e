#include "tga/graphs.hpp"

#include "tga/errors.hpp"
#include "tga/kernels.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace tga {

static constexpr double kVarFloor = 1e-24;
static constexpr double kDegreeFloor = 1e-12;

Tensor pearson_matrix(const TimeSeries& ts) {
    const std::size_t t = ts.data.rows();
    const std::size_t n = ts.data.cols();
    if (t < 2)
        throw DataError("pearson_matrix: subject " + ts.subject_id + " has " +
                        std::to_string(t) + " time points, need at least 2");
    std::vector<double> mean(n), inv_sd(n);
    Tensor corr(n, n);
    std::size_t bad = n;
    kernels::pearson(ts.data.data(), t, n, mean.data(), inv_sd.data(), corr.data(),
                     kVarFloor, &bad);
    if (bad != n)
        throw DataError("pearson_matrix: constant signal in column " +
                        std::to_string(bad) + " of subject " + ts.subject_id);
    return corr;
}

Tensor weighted_degree(const Tensor& a) {
    if (a.rows() != a.cols())
        throw ShapeError("weighted_degree: matrix not square, " + a.shape_str());
    Tensor d(1, a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (j != i) s += std::abs(a(i, j));
        d[i] = s;
    }
    return d;
}

Tensor normalize_adjacency(const Tensor& a) {
    if (a.rows() != a.cols())
        throw ShapeError("normalize_adjacency: matrix not square, " + a.shape_str());
    const std::size_t n = a.rows();
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(a(i, j));
        inv_sqrt_deg[i] = 1.0 / std::sqrt(std::max(s, kDegreeFloor));
    }
    Tensor out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = inv_sqrt_deg[i] * std::abs(a(i, j)) * inv_sqrt_deg[j];
    return out;
}

BrainGraph build_graph(const TimeSeries& ts) {
    BrainGraph g;
    g.subject_id = ts.subject_id;
    g.adjacency = pearson_matrix(ts);
    g.features = g.adjacency;
    g.degrees = weighted_degree(g.adjacency);
    return g;
}

static bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r'))
        --end;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

TimeSeries load_time_series_csv(const std::filesystem::path& path,
                                const std::string& subject_id) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open time-series file " + path.string() +
                        " for subject " + subject_id);

    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    std::size_t n_cols = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        bool ok = true;
        while (std::getline(ss, tok, ',')) {
            double v = 0.0;
            if (!parse_double(tok, v)) {
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) {
            if (first) { // header row
                first = false;
                continue;
            }
            throw DataError("non-numeric value in " + path.string() + " (subject " +
                            subject_id + ")");
        }
        if (n_cols == 0) n_cols = row.size();
        if (row.size() != n_cols)
            throw DataError("ragged row in " + path.string() + " (subject " + subject_id +
                            "): expected " + std::to_string(n_cols) + " columns, got " +
                            std::to_string(row.size()));
        rows.push_back(std::move(row));
        first = false;
    }
    if (rows.size() < 2)
        throw DataError("time series " + path.string() + " (subject " + subject_id +
                        ") has fewer than 2 usable rows");

    TimeSeries ts;
    ts.subject_id = subject_id;
    ts.data = Tensor(rows.size(), n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n_cols; ++j) ts.data(i, j) = rows[i][j];
    if (!ts.data.all_finite())
        throw DataError("nonfinite value in " + path.string() + " (subject " +
                        subject_id + ")");
    return ts;
}

} // namespace tga
