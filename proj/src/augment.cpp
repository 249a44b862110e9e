#include "tga/augment.hpp"

#include "tga/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tga {

static constexpr double kWeightFloor = 1e-12;

AugmentKind augment_kind_from_string(const std::string& s) {
    if (s == "hnd") return AugmentKind::hnd;
    if (s == "wer") return AugmentKind::wer;
    if (s == "uniform_node") return AugmentKind::uniform_node;
    if (s == "uniform_edge") return AugmentKind::uniform_edge;
    throw ConfigError("unknown augmentation kind '" + s +
                      "' (expected hnd, wer, uniform_node or uniform_edge)");
}

std::string to_string(AugmentKind k) {
    switch (k) {
        case AugmentKind::hnd: return "hnd";
        case AugmentKind::wer: return "wer";
        case AugmentKind::uniform_node: return "uniform_node";
        case AugmentKind::uniform_edge: return "uniform_edge";
    }
    return "?";
}

void AugmentStrategy::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ConfigError("augment.alpha must lie in [0, 1), got " + std::to_string(alpha));
    if (!(beta >= 0.0 && beta < 1.0))
        throw ConfigError("augment.beta must lie in [0, 1), got " + std::to_string(beta));
}

Tensor hnd_probabilities(const BrainGraph& g) {
    const std::size_t n = g.degrees.size();
    Tensor p(1, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g.degrees[i] > 0.0))
            throw DomainError("hnd_probabilities: node " + std::to_string(i) +
                              " has zero weighted degree, graph is degenerate");
        p[i] = 1.0 / g.degrees[i];
        total += p[i];
    }
    for (std::size_t i = 0; i < n; ++i) p[i] /= total;
    return p;
}

std::vector<double> wer_probabilities(const BrainGraph& g) {
    const std::size_t n = g.adjacency.rows();
    std::vector<double> p(pair_count(n));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double q = 1.0 / std::max(std::abs(g.adjacency(i, j)), kWeightFloor);
            p[pair_index(i, j, n)] = q;
            total += q;
        }
    }
    for (double& v : p) v /= total;
    return p;
}

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> pair_from_index(std::size_t idx, std::size_t n) {
    std::size_t i = 0;
    std::size_t row_len = n - 1;
    while (idx >= row_len) {
        idx -= row_len;
        ++i;
        --row_len;
    }
    return {i, i + 1 + idx};
}

std::vector<std::size_t> weighted_sample_without_replacement(
    const std::vector<double>& probs, std::size_t k, RngStream& rng) {
    std::vector<std::size_t> drawn;
    drawn.reserve(k);
    std::vector<bool> alive(probs.size(), true);
    for (std::size_t d = 0; d < k; ++d) {
        double total = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (alive[i]) total += probs[i];
        const double r = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = probs.size();
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (!alive[i]) continue;
            acc += probs[i];
            if (r < acc) {
                pick = i;
                break;
            }
        }
        if (pick == probs.size()) { // r landed on the rounding tail
            for (std::size_t i = probs.size(); i-- > 0;) {
                if (alive[i]) {
                    pick = i;
                    break;
                }
            }
        }
        alive[pick] = false;
        drawn.push_back(pick);
    }
    return drawn;
}

// round-half-away-from-zero of ratio * count
static std::size_t scaled_count(double ratio, std::size_t count) {
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(count)));
}

static Tensor submatrix(const Tensor& a, const std::vector<std::size_t>& idx) {
    Tensor s(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = a(idx[i], idx[j]);
    return s;
}

AugmentedView sample_node_drop(const BrainGraph& g, double alpha,
                               const Tensor& probs, RngStream& rng) {
    const std::size_t n = g.adjacency.rows();
    const std::size_t k = scaled_count(alpha, n);
    if (k >= n)
        throw ConfigError("node drop ratio " + std::to_string(alpha) + " removes all " +
                          std::to_string(n) + " nodes");

    std::vector<double> p(probs.data(), probs.data() + probs.size());
    const std::vector<std::size_t> dropped = weighted_sample_without_replacement(p, k, rng);

    std::vector<bool> is_dropped(n, false);
    for (std::size_t d : dropped) is_dropped[d] = true;

    AugmentedView view;
    for (std::size_t i = 0; i < n; ++i)
        if (!is_dropped[i]) view.kept_nodes.push_back(i);
    view.a_aug = g.adjacency;
    view.x_view = Tensor(view.kept_nodes.size(), n);
    for (std::size_t r = 0; r < view.kept_nodes.size(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            view.x_view(r, c) = g.features(view.kept_nodes[r], c);
    view.mp_matrix = normalize_adjacency(submatrix(view.a_aug, view.kept_nodes));
    return view;
}

AugmentedView sample_edge_remove(const BrainGraph& g, double beta,
                                 const std::vector<double>& probs, RngStream& rng) {
    const std::size_t n = g.adjacency.rows();
    const std::size_t e = pair_count(n);
    const std::size_t k = scaled_count(beta, e);
    if (k >= e)
        throw ConfigError("edge removal ratio " + std::to_string(beta) +
                          " removes all " + std::to_string(e) + " edges");

    const std::vector<std::size_t> removed =
        weighted_sample_without_replacement(probs, k, rng);

    AugmentedView view;
    view.kept_nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) view.kept_nodes[i] = i;
    view.a_aug = g.adjacency;
    for (std::size_t idx : removed) {
        const auto [i, j] = pair_from_index(idx, n);
        view.a_aug(i, j) = 0.0;
        view.a_aug(j, i) = 0.0;
    }
    view.x_view = g.features;
    view.mp_matrix = normalize_adjacency(view.a_aug);
    return view;
}

AugmentedView uniform_perturb(const BrainGraph& g, const AugmentStrategy& strategy,
                              RngStream& rng) {
    const std::size_t n = g.adjacency.rows();
    if (strategy.kind == AugmentKind::uniform_node) {
        Tensor p(1, n, 1.0 / static_cast<double>(n));
        return sample_node_drop(g, strategy.alpha, p, rng);
    }
    if (strategy.kind == AugmentKind::uniform_edge) {
        std::vector<double> p(pair_count(n), 1.0 / static_cast<double>(pair_count(n)));
        return sample_edge_remove(g, strategy.beta, p, rng);
    }
    throw ConfigError("uniform_perturb called with non-uniform strategy " +
                      to_string(strategy.kind));
}

AugmentedView apply_strategy(const BrainGraph& g, const AugmentStrategy& strategy,
                             RngStream& rng) {
    switch (strategy.kind) {
        case AugmentKind::hnd:
            return sample_node_drop(g, strategy.alpha, hnd_probabilities(g), rng);
        case AugmentKind::wer:
            return sample_edge_remove(g, strategy.beta, wer_probabilities(g), rng);
        case AugmentKind::uniform_node:
        case AugmentKind::uniform_edge:
            return uniform_perturb(g, strategy, rng);
    }
    throw ConfigError("unhandled augmentation kind");
}

RngStream view_stream(std::uint64_t seed, std::uint64_t subject_key,
                      std::uint64_t epoch, std::uint64_t view_index) {
    return RngStream::derive(seed, "view", subject_key ^ (epoch * 0x9e3779b97f4a7c15ULL),
                             view_index);
}

std::pair<AugmentedView, AugmentedView> make_views(const BrainGraph& g,
                                                   const AugmentStrategy& strategy,
                                                   std::uint64_t seed,
                                                   std::uint64_t subject_key,
                                                   std::uint64_t epoch) {
    strategy.validate();
    RngStream r1 = view_stream(seed, subject_key, epoch, 0);
    RngStream r2 = view_stream(seed, subject_key, epoch, 1);
    AugmentedView v1 = apply_strategy(g, strategy, r1);
    AugmentedView v2 = apply_strategy(g, strategy, r2);
    return {std::move(v1), std::move(v2)};
}

} // namespace tga
