#pragma once

#include "tga/graphs.hpp"
#include "tga/rng.hpp"
#include "tga/tensor.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tga {

enum class AugmentKind { hnd, wer, uniform_node, uniform_edge };

AugmentKind augment_kind_from_string(const std::string& s);
std::string to_string(AugmentKind k);

struct AugmentStrategy {
    AugmentKind kind = AugmentKind::hnd;
    double alpha = 0.1; // node drop ratio
    double beta = 0.5;  // edge removal ratio

    void validate() const; // throws ConfigError outside [0, 1)
};

// One augmented view of a brain graph. Surviving nodes keep their full
// N-dimensional feature rows so the encoder input width never changes; only
// the message-passing matrix shrinks.
struct AugmentedView {
    std::vector<std::size_t> kept_nodes; // sorted indices into 0..N-1
    Tensor a_aug;                        // N x N, symmetric, diagonal intact
    Tensor x_view;                       // |kept| x N
    Tensor mp_matrix;                    // |kept| x |kept| normalized adjacency
};

// Node dropping distribution: p_i proportional to 1/d_i, so hubs are the
// least likely to be dropped.
Tensor hnd_probabilities(const BrainGraph& g);

// Edge removal distribution over unordered off-diagonal pairs (i < j):
// p_ij proportional to 1/max(|a_ij|, 1e-12); weak edges go first.
std::vector<double> wer_probabilities(const BrainGraph& g);

// Unordered pair enumeration used by the edge samplers and reports.
std::size_t pair_count(std::size_t n);
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);
std::pair<std::size_t, std::size_t> pair_from_index(std::size_t idx, std::size_t n);

// k sequential weighted draws without replacement, renormalizing after each
// draw. Returned indices are in draw order.
std::vector<std::size_t> weighted_sample_without_replacement(
    const std::vector<double>& probs, std::size_t k, RngStream& rng);

AugmentedView sample_node_drop(const BrainGraph& g, double alpha,
                               const Tensor& probs, RngStream& rng);
AugmentedView sample_edge_remove(const BrainGraph& g, double beta,
                                 const std::vector<double>& probs, RngStream& rng);
AugmentedView uniform_perturb(const BrainGraph& g, const AugmentStrategy& strategy,
                              RngStream& rng);

AugmentedView apply_strategy(const BrainGraph& g, const AugmentStrategy& strategy,
                             RngStream& rng);

// Per-view RNG substream: keyed on (seed, subject, epoch, view index) so
// subjects can be augmented in parallel and views are resampled every epoch.
RngStream view_stream(std::uint64_t seed, std::uint64_t subject_key,
                      std::uint64_t epoch, std::uint64_t view_index);

// Two independent draws from the same strategy and distribution.
std::pair<AugmentedView, AugmentedView> make_views(const BrainGraph& g,
                                                   const AugmentStrategy& strategy,
                                                   std::uint64_t seed,
                                                   std::uint64_t subject_key,
                                                   std::uint64_t epoch);

} // namespace tga
