#pragma once

#include "tga/tensor.hpp"

#include <filesystem>
#include <string>

namespace tga {

// T x N matrix of preprocessed fMRI signals: T time points, N ROIs.
struct TimeSeries {
    std::string subject_id;
    Tensor data;
};

// Complete weighted brain graph for one subject. Node features are the raw
// signed correlation rows (X = A); degrees are weighted strengths.
struct BrainGraph {
    std::string subject_id;
    Tensor adjacency; // N x N Pearson, symmetric, unit diagonal
    Tensor features;  // X = A
    Tensor degrees;   // 1 x N, d_i = sum_{j != i} |a_ij|
};

// Pearson correlation of all column pairs; population standard deviations in
// the denominator. Throws DataError naming the column on constant signals.
Tensor pearson_matrix(const TimeSeries& ts);

// d_i = sum over j != i of |a_ij|.
Tensor weighted_degree(const Tensor& a);

// A_hat = D^{-1/2} |A| D^{-1/2} with D = diag(row sums of |A| including the
// diagonal), each D_ii floored at 1e-12 so rows isolated by edge removal
// yield zero rows instead of dividing by zero.
Tensor normalize_adjacency(const Tensor& a);

BrainGraph build_graph(const TimeSeries& ts);

// CSV time series: T rows x N comma-separated numeric columns. A single
// header row is skipped when its first row fails numeric parsing.
TimeSeries load_time_series_csv(const std::filesystem::path& path,
                                const std::string& subject_id);

} // namespace tga
