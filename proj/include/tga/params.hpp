#pragma once

#include "tga/rng.hpp"
#include "tga/tensor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tga {

struct Param {
    Tensor value;
    Tensor grad;
    Tensor m; // Adam first moment
    Tensor v; // Adam second moment
    std::int64_t step = 0;
    bool trainable = true;
};

// Insertion-ordered set of named parameter tensors. The order is part of the
// checkpoint contract, so it must be stable across runs.
class ParamSet {
public:
    Param& add(const std::string& name, Tensor value);
    Param& at(std::string_view name);
    const Param& at(std::string_view name) const;
    bool contains(std::string_view name) const;

    void zero_grad();

    std::size_t size() const { return entries_.size(); }
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<std::pair<std::string, Param>> entries_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One Adam update with bias correction over every trainable entry; gradients
// are zeroed afterward and each entry's step counter advances. Throws
// DivergedError on a nonfinite gradient.
void adam_step(ParamSet& params, const AdamConfig& cfg);

// Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]; the stream is
// derived per parameter name so insertion order does not matter.
Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in,
                    std::uint64_t seed, std::string_view name);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    bool pass = false;
};

// Central-difference check of the analytic gradients stored in params.grad
// against f evaluated at perturbed copies. f must be deterministic. Relative
// error uses |a - n| / max(1, |a|, |n|) per coordinate.
GradCheckReport finite_diff_check(const std::function<double(const ParamSet&)>& f,
                                  const ParamSet& params, double h, double tol);

} // namespace tga
