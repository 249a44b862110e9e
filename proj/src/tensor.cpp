#include "tga/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace tga {

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Tensor t(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != t.cols_) throw std::invalid_argument("from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : r) t(i, j++) = v;
        ++i;
    }
    return t;
}

Tensor Tensor::row(std::initializer_list<double> values) {
    Tensor t(1, values.size());
    std::size_t j = 0;
    for (double v : values) t(0, j++) = v;
    return t;
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

std::string Tensor::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace tga
