#include "tga/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tga::kernels {

// Work below this many multiply-adds is not worth a parallel region.
static constexpr std::size_t kParallelCutoff = 1 << 15;

// Row kernels shared by the serial and OpenMP entry points. Each output
// element is accumulated in increasing k by exactly one thread, and both
// variants run the exact same code, so parallel == serial bitwise. noinline
// keeps the compiler from specializing the two call sites differently.

namespace {

[[gnu::noinline]] void mm_row_nn(const double* arow, const double* b, double* crow,
                                 std::size_t k, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
        const double s = arow[p];
        const double* brow = b + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += s * brow[j];
    }
}

[[gnu::noinline]] void mm_row_tn(const double* a, const double* b, double* crow,
                                 std::size_t i, std::size_t m, std::size_t k,
                                 std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
        const double s = a[p * m + i];
        const double* brow = b + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += s * brow[j];
    }
}

[[gnu::noinline]] void column_stats(const double* ts, std::size_t t, std::size_t n,
                                    std::size_t j, double inv_t, double* mean,
                                    double* var) {
    double s = 0.0;
    for (std::size_t r = 0; r < t; ++r) s += ts[r * n + j];
    const double mu = s * inv_t;
    double v = 0.0;
    for (std::size_t r = 0; r < t; ++r) {
        const double d = ts[r * n + j] - mu;
        v += d * d;
    }
    *mean = mu;
    *var = v * inv_t;
}

[[gnu::noinline]] void corr_row(const double* ts, std::size_t t, std::size_t n,
                                std::size_t i, double inv_t, const double* mean,
                                const double* inv_sd, double* corr) {
    corr[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
        double cov = 0.0;
        for (std::size_t r = 0; r < t; ++r)
            cov += (ts[r * n + i] - mean[i]) * (ts[r * n + j] - mean[j]);
        const double rho = cov * inv_t * inv_sd[i] * inv_sd[j];
        corr[i * n + j] = rho;
        corr[j * n + i] = rho;
    }
}

void transpose_into(const double* b, double* bt, std::size_t rows, std::size_t cols) {
    // b is [rows x cols], bt becomes [cols x rows]
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) bt[j * rows + i] = b[i * cols + j];
}

} // namespace

void matmul_nn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelCutoff)
    for (std::ptrdiff_t i = 0; i < mm; ++i)
        mm_row_nn(a + static_cast<std::size_t>(i) * k, b,
                  c + static_cast<std::size_t>(i) * n, k, n);
}

void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelCutoff)
    for (std::ptrdiff_t i = 0; i < mm; ++i)
        mm_row_tn(a, b, c + static_cast<std::size_t>(i) * n,
                  static_cast<std::size_t>(i), m, k, n);
}

void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    // Transposing b up front turns the row-row dot products into the same
    // contiguous axpy pattern as matmul_nn.
    std::vector<double> bt(k * n);
    transpose_into(b, bt.data(), n, k);
    matmul_nn(a, bt.data(), c, m, k, n);
}

void pearson(const double* ts, std::size_t t, std::size_t n,
             double* mean, double* inv_sd, double* corr,
             double var_floor, std::size_t* bad_column) {
    const double inv_t = 1.0 / static_cast<double>(t);
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(static) if (t * n > kParallelCutoff)
    for (std::ptrdiff_t j = 0; j < nn; ++j)
        column_stats(ts, t, n, static_cast<std::size_t>(j), inv_t, &mean[j], &inv_sd[j]);

    *bad_column = n;
    for (std::size_t j = 0; j < n; ++j) {
        if (inv_sd[j] < var_floor) {
            *bad_column = j;
            return;
        }
    }
    for (std::size_t j = 0; j < n; ++j) inv_sd[j] = 1.0 / std::sqrt(inv_sd[j]);

#pragma omp parallel for schedule(dynamic) if (t * n * n > kParallelCutoff)
    for (std::ptrdiff_t i = 0; i < nn; ++i)
        corr_row(ts, t, n, static_cast<std::size_t>(i), inv_t, mean, inv_sd, corr);
}

namespace serial {

void matmul_nn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) mm_row_nn(a + i * k, b, c + i * n, k, n);
}

void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) mm_row_tn(a, b, c + i * n, i, m, k, n);
}

void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
    std::vector<double> bt(k * n);
    transpose_into(b, bt.data(), n, k);
    serial::matmul_nn(a, bt.data(), c, m, k, n);
}

void pearson(const double* ts, std::size_t t, std::size_t n,
             double* mean, double* inv_sd, double* corr,
             double var_floor, std::size_t* bad_column) {
    const double inv_t = 1.0 / static_cast<double>(t);
    for (std::size_t j = 0; j < n; ++j)
        column_stats(ts, t, n, j, inv_t, &mean[j], &inv_sd[j]);
    *bad_column = n;
    for (std::size_t j = 0; j < n; ++j) {
        if (inv_sd[j] < var_floor) {
            *bad_column = j;
            return;
        }
    }
    for (std::size_t j = 0; j < n; ++j) inv_sd[j] = 1.0 / std::sqrt(inv_sd[j]);
    for (std::size_t i = 0; i < n; ++i)
        corr_row(ts, t, n, i, inv_t, mean, inv_sd, corr);
}

} // namespace serial

} // namespace tga::kernels
