#include "tga/params.hpp"

#include "tga/errors.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tga {

Param& ParamSet::add(const std::string& name, Tensor value) {
    if (contains(name)) throw std::logic_error("ParamSet: duplicate entry " + name);
    Param p;
    p.grad = Tensor(value.rows(), value.cols());
    p.m = Tensor(value.rows(), value.cols());
    p.v = Tensor(value.rows(), value.cols());
    p.value = std::move(value);
    entries_.emplace_back(name, std::move(p));
    return entries_.back().second;
}

Param& ParamSet::at(std::string_view name) {
    for (auto& [n, p] : entries_)
        if (n == name) return p;
    throw std::logic_error("ParamSet: no entry named " + std::string(name));
}

const Param& ParamSet::at(std::string_view name) const {
    for (const auto& [n, p] : entries_)
        if (n == name) return p;
    throw std::logic_error("ParamSet: no entry named " + std::string(name));
}

bool ParamSet::contains(std::string_view name) const {
    for (const auto& [n, p] : entries_)
        if (n == name) return true;
    return false;
}

void ParamSet::zero_grad() {
    for (auto& [n, p] : entries_)
        for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] = 0.0;
}

void adam_step(ParamSet& params, const AdamConfig& cfg) {
    for (auto& [name, p] : params) {
        if (!p.trainable) {
            for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] = 0.0;
            continue;
        }
        p.step += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step));
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            if (!std::isfinite(g))
                throw DivergedError("adam_step: nonfinite gradient in " + name);
            p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
            p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = p.m[i] / bc1;
            const double vhat = p.v[i] / bc2;
            p.value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
            p.grad[i] = 0.0;
        }
    }
}

Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in,
                    std::uint64_t seed, std::string_view name) {
    RngStream rng = RngStream::derive(seed, "init", hash_str(name));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = (2.0 * rng.uniform() - 1.0) * bound;
    return t;
}

GradCheckReport finite_diff_check(const std::function<double(const ParamSet&)>& f,
                                  const ParamSet& params, double h, double tol) {
    GradCheckReport report;

    // Coordinates are independent, so they can be checked in parallel, each
    // thread perturbing its own copy of the parameters.
    std::vector<std::pair<std::string, std::size_t>> coords;
    for (const auto& [name, p] : params)
        for (std::size_t i = 0; i < p.value.size(); ++i) coords.emplace_back(name, i);

    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(coords.size());

#pragma omp parallel
    {
        ParamSet local = params;
        double worst = 0.0;
        std::string worst_param;
        std::size_t worst_index = 0;

#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t c = 0; c < total; ++c) {
            const auto& [name, i] = coords[static_cast<std::size_t>(c)];
            Param& lp = local.at(name);
            const double orig = lp.value[i];

            lp.value[i] = orig + h;
            const double fp = f(local);
            lp.value[i] = orig - h;
            const double fm = f(local);
            lp.value[i] = orig;

            const double numeric = (fp - fm) / (2.0 * h);
            const double analytic = params.at(name).grad[i];
            const double scale =
                std::max(1.0, std::max(std::abs(numeric), std::abs(analytic)));
            const double rel = std::abs(numeric - analytic) / scale;
            if (rel > worst) {
                worst = rel;
                worst_param = name;
                worst_index = i;
            }
        }

#pragma omp critical
        {
            if (worst > report.max_rel_error) {
                report.max_rel_error = worst;
                report.worst_param = worst_param;
                report.worst_index = worst_index;
            }
        }
    }

    report.pass = report.max_rel_error <= tol;
    return report;
}

} // namespace tga
