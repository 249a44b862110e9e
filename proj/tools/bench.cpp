// Times the OpenMP kernels against their serial references and reports the
// speedup per shape. Shapes mirror the hot paths: encoder matmuls at cohort
// scale and Pearson construction from raw series.

#include "tga/kernels.hpp"
#include "tga/rng.hpp"

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> random_matrix(std::size_t rows, std::size_t cols, tga::RngStream& rng) {
    std::vector<double> m(rows * cols);
    for (double& v : m) v = rng.normal();
    return m;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void bench_matmul(std::size_t m, std::size_t k, std::size_t n, int reps) {
    tga::RngStream rng(1);
    const auto a = random_matrix(m, k, rng);
    const auto b = random_matrix(k, n, rng);
    std::vector<double> c(m * n);

    const double ts = time_best_of(
        reps, [&] { tga::kernels::serial::matmul_nn(a.data(), b.data(), c.data(), m, k, n); });
    const double tp = time_best_of(
        reps, [&] { tga::kernels::matmul_nn(a.data(), b.data(), c.data(), m, k, n); });
    const double gflops = 2.0 * static_cast<double>(m * k * n) / ts / 1e9;
    std::printf("matmul %4zux%-4zu * %4zux%-4zu  serial %8.3f ms (%5.2f GF/s)  omp %8.3f ms  speedup %.2fx\n",
                m, k, k, n, ts * 1e3, gflops, tp * 1e3, ts / tp);
}

void bench_pearson(std::size_t t, std::size_t n, int reps) {
    tga::RngStream rng(2);
    const auto ts_data = random_matrix(t, n, rng);
    std::vector<double> mean(n), isd(n), corr(n * n);
    std::size_t bad = 0;

    const double ts = time_best_of(reps, [&] {
        tga::kernels::serial::pearson(ts_data.data(), t, n, mean.data(), isd.data(),
                                      corr.data(), 1e-24, &bad);
    });
    const double tp = time_best_of(reps, [&] {
        tga::kernels::pearson(ts_data.data(), t, n, mean.data(), isd.data(), corr.data(),
                              1e-24, &bad);
    });
    std::printf("pearson %4zu ts x %-4zu rois      serial %8.3f ms             omp %8.3f ms  speedup %.2fx\n",
                t, n, ts * 1e3, tp * 1e3, ts / tp);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif
    bench_matmul(90, 90, 64, 20);
    bench_matmul(90, 64, 64, 20);
    bench_matmul(256, 256, 256, 10);
    bench_matmul(512, 512, 512, 5);
    bench_pearson(230, 90, 20);
    bench_pearson(500, 200, 5);
    bench_pearson(1000, 400, 3);
    return 0;
}
