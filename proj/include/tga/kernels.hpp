#pragma once

#include <cstddef>

namespace tga::kernels {

// Dense inner loops shared by the whole toolkit. Each kernel has an
// OpenMP-parallel version (default entry points) and a serial reference in
// kernels::serial. Both compute every output element with the identical
// serial inner loop, so results are bitwise equal regardless of thread count;
// tests assert that and tools/bench.cpp times the two side by side.
//
// All matrices are row-major, double.

// c[m x n] = a[m x k] * b[k x n]
void matmul_nn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);

// c[m x n] = a^T[m x k] * b[k x n], a stored as [k x m]
void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);

// c[m x n] = a[m x k] * b^T[k x n], b stored as [n x k]
void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);

// corr[n x n] = Pearson correlation of the columns of ts[t x n].
// mean/inv_sd are workspaces of length n filled by the kernel; a column with
// population variance below var_floor reports its index in *bad_column (set
// to n when all columns are fine) and leaves corr unspecified.
void pearson(const double* ts, std::size_t t, std::size_t n,
             double* mean, double* inv_sd, double* corr,
             double var_floor, std::size_t* bad_column);

namespace serial {

void matmul_nn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);
void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);
void pearson(const double* ts, std::size_t t, std::size_t n,
             double* mean, double* inv_sd, double* corr,
             double var_floor, std::size_t* bad_column);

} // namespace serial

} // namespace tga::kernels
