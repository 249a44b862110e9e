#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace tga {

// All randomness in the toolkit flows from one top-level seed through named
// substreams, so runs are reproducible bit-for-bit and independent work items
// (subjects, epochs, views, folds) can draw in parallel without sharing state.
//
// Uniform/normal variates are generated by hand from raw mt19937_64 output;
// std::uniform_real_distribution is implementation-defined and would break
// cross-platform determinism.

std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a, used to fold stream labels and subject ids into seeds.
std::uint64_t hash_str(std::string_view s);

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    // Child stream keyed by (seed, label, a, b).
    static RngStream derive(std::uint64_t seed, std::string_view label,
                            std::uint64_t a = 0, std::uint64_t b = 0);

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double normal();

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// In-place Fisher-Yates shuffle of an index vector.
template <typename T>
void shuffle(std::vector<T>& v, RngStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace tga
