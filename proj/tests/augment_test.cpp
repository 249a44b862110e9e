#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tga/augment.hpp"
#include "tga/errors.hpp"
#include "tga/graphs.hpp"
#include "tga/rng.hpp"

#include <cmath>
#include <numeric>

using namespace tga;

namespace {

BrainGraph graph_from_adjacency(Tensor a) {
    BrainGraph g;
    g.subject_id = "fixture";
    g.degrees = weighted_degree(a);
    g.features = a;
    g.adjacency = std::move(a);
    return g;
}

BrainGraph random_graph(std::size_t n, std::uint64_t seed) {
    TimeSeries ts;
    ts.subject_id = "rand" + std::to_string(seed);
    ts.data = Tensor(4 * n, n);
    RngStream rng(seed);
    for (std::size_t i = 0; i < ts.data.size(); ++i) ts.data[i] = rng.normal();
    return build_graph(ts);
}

// Planted hub: node 0 coupled at 0.9 to everyone, the rest at 0.1.
BrainGraph hub_graph(std::size_t n) {
    Tensor a(n, n, 0.1);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 1.0;
        a(0, i) = a(i, 0) = 0.9;
    }
    a(0, 0) = 1.0;
    return graph_from_adjacency(std::move(a));
}

// 0.999 chi-square quantiles by degrees of freedom.
double chi2_q999(std::size_t df) {
    switch (df) {
        case 3: return 16.266;
        case 5: return 20.515;
        case 9: return 27.877;
        default: REQUIRE(false); return 0.0;
    }
}

} // namespace

TEST_CASE("hnd_probabilities") {
    BrainGraph g;
    g.degrees = Tensor::row({1, 2, 4});
    const Tensor p = hnd_probabilities(g);
    CHECK(p[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    g.degrees = Tensor(1, 5, 3.3); // uniform degrees
    const Tensor pu = hnd_probabilities(g);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(pu[i] == doctest::Approx(0.2).epsilon(1e-14));

    g.degrees = Tensor::row({1, 1, 2});
    const Tensor pt = hnd_probabilities(g);
    CHECK(pt[0] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(pt[1] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(pt[2] == doctest::Approx(0.2).epsilon(1e-14));

    g.degrees = Tensor::row({1, 0, 2});
    CHECK_THROWS_AS(hnd_probabilities(g), DomainError);
}

TEST_CASE("wer_probabilities") {
    // pairs (0,1)=0.2, (0,2)=0.4, (1,2)=0.8
    Tensor a = Tensor::from_rows({{1, 0.2, 0.4}, {0.2, 1, 0.8}, {0.4, 0.8, 1}});
    const BrainGraph g = graph_from_adjacency(std::move(a));
    const auto p = wer_probabilities(g);
    REQUIRE(p.size() == 3);
    CHECK(p[pair_index(0, 1, 3)] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(p[pair_index(0, 2, 3)] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(p[pair_index(1, 2, 3)] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    // all equal weights: uniform over edges; sign must not matter
    Tensor eq(4, 4, -0.5);
    for (std::size_t i = 0; i < 4; ++i) eq(i, i) = 1.0;
    const auto pe = wer_probabilities(graph_from_adjacency(std::move(eq)));
    for (double v : pe) CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // weights 0.5 vs 0.25 -> q 2 vs 4 -> removal odds 1:2
    Tensor two = Tensor::from_rows({{1, 0.5, 0.5}, {0.5, 1, 0.25}, {0.5, 0.25, 1}});
    const auto p2 = wer_probabilities(graph_from_adjacency(std::move(two)));
    CHECK(p2[pair_index(1, 2, 3)] / p2[pair_index(0, 1, 3)] ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("probability vectors are normalized") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const BrainGraph g = random_graph(9, 300 + seed);
        const Tensor p = hnd_probabilities(g);
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= 0.0);
            sum += p[i];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        const auto pe = wer_probabilities(g);
        sum = std::accumulate(pe.begin(), pe.end(), 0.0);
        for (double v : pe) CHECK(v >= 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("pair indexing round-trips") {
    const std::size_t n = 11;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            CHECK(pair_index(i, j, n) == idx);
            const auto [a, b] = pair_from_index(idx, n);
            CHECK(a == i);
            CHECK(b == j);
        }
    }
    CHECK(pair_count(n) == idx);
}

TEST_CASE("sample_node_drop") {
    const BrainGraph g = random_graph(10, 1);
    const Tensor probs = hnd_probabilities(g);

    SUBCASE("alpha 0.1 on 10 nodes drops exactly one") {
        RngStream rng(7);
        const AugmentedView v = sample_node_drop(g, 0.1, probs, rng);
        CHECK(v.kept_nodes.size() == 9);
        CHECK(v.x_view.rows() == 9);
        CHECK(v.x_view.cols() == 10);
        CHECK(v.mp_matrix.rows() == 9);
        CHECK(v.a_aug == g.adjacency);
    }

    SUBCASE("alpha 0 is the identity view") {
        RngStream rng(7);
        const AugmentedView v = sample_node_drop(g, 0.0, probs, rng);
        CHECK(v.kept_nodes.size() == 10);
        CHECK(v.x_view == g.features);
        CHECK(v.mp_matrix == normalize_adjacency(g.adjacency));
    }

    SUBCASE("overwhelming probability mass drops that node almost always") {
        BrainGraph g3 = random_graph(3, 2);
        const double eps = 1e-4;
        const Tensor p3 = Tensor::row({1.0 - 2 * eps, eps, eps});
        RngStream rng(11);
        int dropped0 = 0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            const AugmentedView v = sample_node_drop(g3, 1.0 / 3.0, p3, rng);
            REQUIRE(v.kept_nodes.size() == 2);
            bool kept0 = false;
            for (std::size_t kn : v.kept_nodes) kept0 = kept0 || kn == 0;
            if (!kept0) ++dropped0;
        }
        CHECK(dropped0 >= trials * 99 / 100);
    }

    SUBCASE("ratio that would drop every node is rejected") {
        RngStream rng(7);
        const BrainGraph g2 = random_graph(2, 3);
        const Tensor p2 = Tensor::row({0.5, 0.5});
        CHECK_THROWS_AS(sample_node_drop(g2, 0.8, p2, rng), ConfigError);
    }
}

TEST_CASE("sample_edge_remove") {
    const BrainGraph g = random_graph(4, 4);
    const auto probs = wer_probabilities(g);

    SUBCASE("beta 0.5 on 6 edges removes exactly 3, symmetrically") {
        RngStream rng(5);
        const AugmentedView v = sample_edge_remove(g, 0.5, probs, rng);
        CHECK(v.kept_nodes.size() == 4);
        std::size_t zeroed = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(v.a_aug(i, i) == g.adjacency(i, i)); // diagonal untouched
            for (std::size_t j = i + 1; j < 4; ++j) {
                CHECK(v.a_aug(i, j) == v.a_aug(j, i));
                if (v.a_aug(i, j) == 0.0) ++zeroed;
            }
        }
        CHECK(zeroed == 3);
        CHECK(v.mp_matrix == normalize_adjacency(v.a_aug));
    }

    SUBCASE("beta 0 leaves the adjacency bitwise intact") {
        RngStream rng(5);
        const AugmentedView v = sample_edge_remove(g, 0.0, probs, rng);
        CHECK(v.a_aug == g.adjacency);
    }

    SUBCASE("uniform weights remove each edge at frequency beta") {
        Tensor eq(4, 4, 0.5);
        for (std::size_t i = 0; i < 4; ++i) eq(i, i) = 1.0;
        const BrainGraph ge = graph_from_adjacency(std::move(eq));
        const auto pe = wer_probabilities(ge);
        RngStream rng(9);
        const int trials = 100000;
        std::vector<int> removed(6, 0);
        for (int t = 0; t < trials; ++t) {
            const AugmentedView v = sample_edge_remove(ge, 0.5, pe, rng);
            for (std::size_t e = 0; e < 6; ++e) {
                const auto [i, j] = pair_from_index(e, 4);
                if (v.a_aug(i, j) == 0.0) ++removed[e];
            }
        }
        for (std::size_t e = 0; e < 6; ++e) {
            const double freq = static_cast<double>(removed[e]) / trials;
            CHECK(std::abs(freq - 0.5) <= 0.01);
        }
    }
}

TEST_CASE("uniform_perturb") {
    SUBCASE("uniform node dropping hits every node at alpha") {
        const BrainGraph g = random_graph(10, 21);
        AugmentStrategy s;
        s.kind = AugmentKind::uniform_node;
        s.alpha = 0.1;
        RngStream rng(3);
        const int trials = 100000;
        std::vector<int> dropped(10, 0);
        for (int t = 0; t < trials; ++t) {
            const AugmentedView v = uniform_perturb(g, s, rng);
            std::vector<bool> kept(10, false);
            for (std::size_t kn : v.kept_nodes) kept[kn] = true;
            for (std::size_t i = 0; i < 10; ++i)
                if (!kept[i]) ++dropped[i];
        }
        for (std::size_t i = 0; i < 10; ++i) {
            const double freq = static_cast<double>(dropped[i]) / trials;
            CHECK(std::abs(freq - 0.1) <= 0.01);
        }
    }

    SUBCASE("uniform edge removing with beta 0 is the identity") {
        const BrainGraph g = random_graph(5, 22);
        AugmentStrategy s;
        s.kind = AugmentKind::uniform_edge;
        s.beta = 0.0;
        RngStream rng(3);
        const AugmentedView v = uniform_perturb(g, s, rng);
        CHECK(v.a_aug == g.adjacency);
        CHECK(v.kept_nodes.size() == 5);
    }

    SUBCASE("wrong kind is rejected") {
        const BrainGraph g = random_graph(5, 23);
        AugmentStrategy s;
        s.kind = AugmentKind::hnd;
        RngStream rng(3);
        CHECK_THROWS_AS(uniform_perturb(g, s, rng), ConfigError);
    }
}

TEST_CASE("hub preservation: HND drops the hub less than uniform dropping") {
    const BrainGraph g = hub_graph(8);
    const Tensor probs = hnd_probabilities(g);
    const double alpha = 0.125; // one node per draw
    const int trials = 100000;

    RngStream rng_h(41), rng_u(42);
    AugmentStrategy uni;
    uni.kind = AugmentKind::uniform_node;
    uni.alpha = alpha;

    int hub_dropped_hnd = 0, hub_dropped_uni = 0;
    double degree_sum_hnd = 0.0, degree_sq_hnd = 0.0;
    double degree_sum_uni = 0.0, degree_sq_uni = 0.0;
    for (int t = 0; t < trials; ++t) {
        const AugmentedView vh = sample_node_drop(g, alpha, probs, rng_h);
        const AugmentedView vu = uniform_perturb(g, uni, rng_u);
        std::vector<bool> kept_h(8, false), kept_u(8, false);
        for (std::size_t kn : vh.kept_nodes) kept_h[kn] = true;
        for (std::size_t kn : vu.kept_nodes) kept_u[kn] = true;
        if (!kept_h[0]) ++hub_dropped_hnd;
        if (!kept_u[0]) ++hub_dropped_uni;
        for (std::size_t i = 0; i < 8; ++i) {
            if (!kept_h[i]) {
                degree_sum_hnd += g.degrees[i];
                degree_sq_hnd += g.degrees[i] * g.degrees[i];
            }
            if (!kept_u[i]) {
                degree_sum_uni += g.degrees[i];
                degree_sq_uni += g.degrees[i] * g.degrees[i];
            }
        }
    }

    // hub drop frequency: lower under HND by at least 3 standard errors
    const double fh = static_cast<double>(hub_dropped_hnd) / trials;
    const double fu = static_cast<double>(hub_dropped_uni) / trials;
    const double se =
        std::sqrt(fh * (1 - fh) / trials + fu * (1 - fu) / trials);
    CHECK(fu - fh >= 3.0 * se);

    // mean dropped degree: lower under HND by at least 3 standard errors
    const double mh = degree_sum_hnd / trials;
    const double mu = degree_sum_uni / trials;
    const double var_h = degree_sq_hnd / trials - mh * mh;
    const double var_u = degree_sq_uni / trials - mu * mu;
    const double se_mean = std::sqrt(var_h / trials + var_u / trials);
    CHECK(mu - mh >= 3.0 * se_mean);
}

TEST_CASE("single-draw marginals match the stated distributions (chi-square)") {
    const int trials = 100000;

    SUBCASE("HND on a 10-node graph") {
        const BrainGraph g = random_graph(10, 31);
        const Tensor probs = hnd_probabilities(g);
        std::vector<double> p(probs.data(), probs.data() + probs.size());
        RngStream rng(51);
        std::vector<int> counts(10, 0);
        for (int t = 0; t < trials; ++t)
            ++counts[weighted_sample_without_replacement(p, 1, rng)[0]];
        double chi2 = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            const double expected = p[i] * trials;
            const double d = counts[i] - expected;
            chi2 += d * d / expected;
            CHECK(std::abs(counts[i] / static_cast<double>(trials) - p[i]) <= 0.01);
        }
        CHECK(chi2 < chi2_q999(9));
    }

    SUBCASE("WER on a 4-node graph") {
        Tensor a(4, 4);
        const double w[6] = {0.2, 0.4, 0.8, 0.5, 0.6, 0.3};
        for (std::size_t e = 0; e < 6; ++e) {
            const auto [i, j] = pair_from_index(e, 4);
            a(i, j) = a(j, i) = w[e];
        }
        for (std::size_t i = 0; i < 4; ++i) a(i, i) = 1.0;
        const BrainGraph g = graph_from_adjacency(std::move(a));
        const auto p = wer_probabilities(g);
        RngStream rng(52);
        std::vector<int> counts(6, 0);
        for (int t = 0; t < trials; ++t)
            ++counts[weighted_sample_without_replacement(p, 1, rng)[0]];
        double chi2 = 0.0;
        for (std::size_t e = 0; e < 6; ++e) {
            const double expected = p[e] * trials;
            const double d = counts[e] - expected;
            chi2 += d * d / expected;
            CHECK(std::abs(counts[e] / static_cast<double>(trials) - p[e]) <= 0.01);
        }
        CHECK(chi2 < chi2_q999(5));
    }
}

TEST_CASE("WER removal ratio of weakest vs strongest edge follows first-draw odds") {
    // one edge removed per view (beta 0.16 of 6 edges), so inclusion equals
    // the first-draw distribution exactly
    Tensor a(4, 4);
    const double w[6] = {0.2, 0.4, 0.8, 0.5, 0.6, 0.3};
    for (std::size_t e = 0; e < 6; ++e) {
        const auto [i, j] = pair_from_index(e, 4);
        a(i, j) = a(j, i) = w[e];
    }
    for (std::size_t i = 0; i < 4; ++i) a(i, i) = 1.0;
    const BrainGraph g = graph_from_adjacency(std::move(a));
    const auto p = wer_probabilities(g);

    const std::size_t weakest = pair_index(0, 1, 4);  // |a| = 0.2
    const std::size_t strongest = pair_index(0, 3, 4); // |a| = 0.8
    REQUIRE(w[weakest] == 0.2);
    REQUIRE(w[strongest] == 0.8);

    RngStream rng(53);
    const int trials = 100000;
    int removed_weak = 0, removed_strong = 0;
    for (int t = 0; t < trials; ++t) {
        const AugmentedView v = sample_edge_remove(g, 0.16, p, rng);
        const auto [wi, wj] = pair_from_index(weakest, 4);
        const auto [si, sj] = pair_from_index(strongest, 4);
        if (v.a_aug(wi, wj) == 0.0) ++removed_weak;
        if (v.a_aug(si, sj) == 0.0) ++removed_strong;
    }
    const double predicted = p[weakest] / p[strongest];
    const double observed =
        static_cast<double>(removed_weak) / static_cast<double>(removed_strong);
    CHECK(std::abs(observed - predicted) <= 0.05 * predicted);
}

TEST_CASE("make_views") {
    const BrainGraph g = random_graph(10, 61);

    SUBCASE("hnd with alpha 0.1 keeps 9 nodes in both views") {
        AugmentStrategy s;
        s.kind = AugmentKind::hnd;
        s.alpha = 0.1;
        const auto [v1, v2] = make_views(g, s, 77, 1, 0);
        CHECK(v1.kept_nodes.size() == 9);
        CHECK(v2.kept_nodes.size() == 9);
    }

    SUBCASE("zero ratios give structurally identical views") {
        AugmentStrategy s;
        s.kind = AugmentKind::hnd;
        s.alpha = 0.0;
        const auto [v1, v2] = make_views(g, s, 77, 1, 0);
        CHECK(v1.kept_nodes == v2.kept_nodes);
        CHECK(v1.a_aug == v2.a_aug);
        CHECK(v1.mp_matrix == v2.mp_matrix);

        s.kind = AugmentKind::wer;
        s.beta = 0.0;
        const auto [e1, e2] = make_views(g, s, 77, 1, 0);
        CHECK(e1.a_aug == e2.a_aug);
    }

    SUBCASE("fixed seed reproduces the view pair bitwise") {
        AugmentStrategy s;
        s.kind = AugmentKind::wer;
        s.beta = 0.5;
        const auto [a1, a2] = make_views(g, s, 123, 9, 4);
        const auto [b1, b2] = make_views(g, s, 123, 9, 4);
        CHECK(a1.a_aug == b1.a_aug);
        CHECK(a2.a_aug == b2.a_aug);
        CHECK(a1.mp_matrix == b1.mp_matrix);
        CHECK(a2.mp_matrix == b2.mp_matrix);

        // different epoch resamples
        const auto [c1, c2] = make_views(g, s, 123, 9, 5);
        CHECK(c1.a_aug != a1.a_aug);
    }

    SUBCASE("the two views draw from independent substreams") {
        AugmentStrategy s;
        s.kind = AugmentKind::hnd;
        s.alpha = 0.3;
        int distinct = 0;
        for (std::uint64_t e = 0; e < 20; ++e) {
            const auto [v1, v2] = make_views(g, s, 5, 2, e);
            if (v1.kept_nodes != v2.kept_nodes) ++distinct;
        }
        CHECK(distinct > 0);
    }
}

TEST_CASE("strategy validation") {
    AugmentStrategy s;
    s.alpha = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.alpha = -0.1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.alpha = 0.5;
    s.beta = 1.2;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.beta = 0.99;
    CHECK_NOTHROW(s.validate());
}
