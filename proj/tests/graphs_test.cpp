#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tga/errors.hpp"
#include "tga/graphs.hpp"
#include "tga/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace tga;

namespace {

TimeSeries make_series(std::initializer_list<std::initializer_list<double>> rows,
                       const std::string& id = "s") {
    TimeSeries ts;
    ts.subject_id = id;
    ts.data = Tensor::from_rows(rows);
    return ts;
}

TimeSeries random_series(std::size_t t, std::size_t n, std::uint64_t seed) {
    TimeSeries ts;
    ts.subject_id = "rand" + std::to_string(seed);
    ts.data = Tensor(t, n);
    RngStream rng(seed);
    for (std::size_t i = 0; i < ts.data.size(); ++i) ts.data[i] = rng.normal();
    return ts;
}

} // namespace

TEST_CASE("pearson_matrix hand cases") {
    // perfectly linear pair
    const Tensor r1 = pearson_matrix(make_series({{1, 2}, {2, 4}, {3, 6}, {4, 8}}));
    CHECK(r1(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    // anti-linear pair
    const Tensor r2 = pearson_matrix(make_series({{1, 4}, {2, 3}, {3, 2}, {4, 1}}));
    CHECK(r2(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));

    // hand-computed covariance / (sd * sd)
    const Tensor r3 = pearson_matrix(make_series({{1, 1}, {2, 3}, {3, 2}}));
    CHECK(r3(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pearson_matrix rejects constant columns by index") {
    const TimeSeries ts = make_series({{1, 5, 2}, {2, 5, 1}, {3, 5, 4}}, "flat");
    CHECK_THROWS_WITH_AS(pearson_matrix(ts), doctest::Contains("column 1"), DataError);
}

TEST_CASE("pearson_matrix invariants on random data") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TimeSeries ts = random_series(50, 8, seed);
        const Tensor r = pearson_matrix(ts);
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(std::abs(r(i, i) - 1.0) <= 1e-12);
            for (std::size_t j = 0; j < 8; ++j) {
                CHECK(std::abs(r(i, j) - r(j, i)) <= 1e-12);
                CHECK(r(i, j) >= -1.0 - 1e-12);
                CHECK(r(i, j) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("pearson_matrix is invariant to positive affine transforms of a column") {
    const TimeSeries base = random_series(40, 5, 77);
    const Tensor r_base = pearson_matrix(base);
    TimeSeries scaled = base;
    for (std::size_t t = 0; t < scaled.data.rows(); ++t)
        scaled.data(t, 2) = 3.7 * scaled.data(t, 2) + 11.0;
    const Tensor r_scaled = pearson_matrix(scaled);
    for (std::size_t i = 0; i < r_base.size(); ++i)
        CHECK(std::abs(r_base[i] - r_scaled[i]) <= 1e-10);
}

TEST_CASE("weighted_degree") {
    const Tensor a =
        Tensor::from_rows({{1, 0.5, -0.5}, {0.5, 1, 0.2}, {-0.5, 0.2, 1}});
    const Tensor d = weighted_degree(a);
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(0.7).epsilon(1e-15));

    CHECK(weighted_degree(Tensor::identity(4)) == Tensor(1, 4));

    // uniform off-diagonal weight: d_i = (N-1)|w|
    const std::size_t n = 6;
    Tensor u(n, n, -0.3);
    for (std::size_t i = 0; i < n; ++i) u(i, i) = 1.0;
    const Tensor du = weighted_degree(u);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(du[i] == doctest::Approx((n - 1) * 0.3).epsilon(1e-12));
}

TEST_CASE("weighted_degree is permutation-equivariant") {
    RngStream rng(5);
    const std::size_t n = 7;
    Tensor a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            a(i, j) = rng.normal();
            a(j, i) = a(i, j);
        }
    const Tensor d = weighted_degree(a);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (i + 3) % n;
    Tensor ap(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ap(i, j) = a(perm[i], perm[j]);
    const Tensor dp = weighted_degree(ap);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(dp[i] == doctest::Approx(d[perm[i]]).epsilon(1e-14));
}

TEST_CASE("normalize_adjacency hand cases") {
    const Tensor a1 = Tensor::from_rows({{0, 1}, {1, 0}});
    CHECK(normalize_adjacency(a1) == a1);

    const Tensor a2 = Tensor::from_rows({{0, 2}, {2, 0}});
    const Tensor n2 = normalize_adjacency(a2);
    CHECK(n2(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(n2(0, 0) == 0.0);

    const Tensor a3 = Tensor::from_rows({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}});
    const Tensor n3 = normalize_adjacency(a3);
    CHECK(n3(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(n3(0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(n3(1, 2) == 0.0);
}

TEST_CASE("normalize_adjacency handles isolated rows and stays symmetric") {
    Tensor a(3, 3);
    a(0, 1) = a(1, 0) = 0.8; // node 2 isolated
    const Tensor n = normalize_adjacency(a);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(n(2, j) == 0.0);
        CHECK(n(j, 2) == 0.0);
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(n(i, j) == n(j, i));
}

TEST_CASE("normalize_adjacency spectral radius stays at most 1") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const TimeSeries ts = random_series(60, 9, 100 + seed);
        const Tensor nrm = normalize_adjacency(pearson_matrix(ts));
        // power iteration; |A| is nonnegative so the dominant eigenvalue is real
        const std::size_t n = nrm.rows();
        Tensor v(n, 1, 1.0);
        double lambda = 0.0;
        for (int it = 0; it < 200; ++it) {
            Tensor w(n, 1);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += nrm(i, j) * v(j, 0);
                w(i, 0) = s;
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += w(i, 0) * w(i, 0);
            norm = std::sqrt(norm);
            REQUIRE(norm > 0.0);
            lambda = norm;
            for (std::size_t i = 0; i < n; ++i) v(i, 0) = w(i, 0) / norm;
        }
        CHECK(lambda <= 1.0 + 1e-9);
    }
}

TEST_CASE("build_graph composition") {
    const TimeSeries ts = make_series({{1, 1, 0.5}, {2, 3, 1.5}, {3, 2, -0.5}, {4, 5, 2}});
    const BrainGraph g = build_graph(ts);
    CHECK(g.features == g.adjacency); // X = A bitwise
    CHECK(g.adjacency == pearson_matrix(ts));
    CHECK(g.degrees == weighted_degree(g.adjacency));

    // determinism across identical subjects
    const BrainGraph g2 = build_graph(ts);
    CHECK(g2.adjacency == g.adjacency);
    CHECK(g2.degrees == g.degrees);
}

TEST_CASE("csv loading") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tga_graphs_test";
    fs::create_directories(dir);

    SUBCASE("plain numeric csv") {
        const fs::path p = dir / "plain.csv";
        std::ofstream(p) << "1.0,2.0\n2.5,4.5\n3.5,6.0\n";
        const TimeSeries ts = load_time_series_csv(p, "plain");
        CHECK(ts.data.rows() == 3);
        CHECK(ts.data.cols() == 2);
        CHECK(ts.data(1, 1) == 4.5);
    }

    SUBCASE("single header row is skipped") {
        const fs::path p = dir / "header.csv";
        std::ofstream(p) << "roi_a,roi_b\n1.0,2.0\n2.5,4.5\n";
        const TimeSeries ts = load_time_series_csv(p, "hdr");
        CHECK(ts.data.rows() == 2);
        CHECK(ts.data(0, 0) == 1.0);
    }

    SUBCASE("ragged row is rejected") {
        const fs::path p = dir / "ragged.csv";
        std::ofstream(p) << "1,2\n3\n";
        CHECK_THROWS_AS(load_time_series_csv(p, "rag"), DataError);
    }

    SUBCASE("missing file names the subject") {
        CHECK_THROWS_WITH_AS(load_time_series_csv(dir / "absent.csv", "subj042"),
                             doctest::Contains("subj042"), DataError);
    }

    SUBCASE("non-numeric body row is rejected") {
        const fs::path p = dir / "bad.csv";
        std::ofstream(p) << "1,2\nx,3\n";
        CHECK_THROWS_AS(load_time_series_csv(p, "bad"), DataError);
    }
}
