#include "episcan/scan.hpp"

#include <algorithm>
#include <cmath>

#include "episcan/error.hpp"
#include "episcan/kernels.hpp"

namespace episcan {
namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0, 1)");
}

void check_input(std::span<const double> x, std::size_t k_min) {
    if (x.empty()) throw DomainError("scan statistic of an empty series");
    if (k_min > 1) throw DomainError("k_min must be 0 or 1");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("scan statistic input contains a non-finite value");
}

}  // namespace

std::vector<std::size_t> geometric_scales(std::size_t n, double ratio) {
    if (!(ratio > 1.0)) throw DomainError("geometric scale ratio must exceed 1");
    if (n == 0) throw DomainError("geometric_scales: n must be at least 1");
    std::vector<std::size_t> out;
    for (double r = 1.0; r <= static_cast<double>(n); r *= ratio) {
        const auto ell = static_cast<std::size_t>(std::ceil(r - 1e-9));
        if (ell > n) break;
        if (out.empty() || out.back() != ell) out.push_back(ell);
    }
    if (out.back() != n) out.push_back(n);
    return out;
}

void ScaleProfile::build(std::span<const double> x, std::size_t k_min, std::vector<std::size_t> scales,
                         bool exact, Execution exec) {
    k_min_ = k_min;
    exact_ = exact;
    prefix_.resize(x.size() + 1);
    kernels::centred_prefix(x, prefix_);
    scales_ = std::move(scales);
    maxima_.assign(scales_.size(), 0.0);
    switch (exec) {
        case Execution::Reference:
            kernels::scale_maxima_reference(prefix_, k_min_, scales_, maxima_);
            break;
        case Execution::Vectorized:
            kernels::scale_maxima_simd(prefix_, k_min_, scales_, maxima_);
            break;
        case Execution::Parallel:
            kernels::scale_maxima_parallel(prefix_, k_min_, scales_, maxima_);
            break;
    }
}

ScaleProfile ScaleProfile::exact(std::span<const double> x, std::size_t k_min, Execution exec) {
    check_input(x, k_min);
    std::vector<std::size_t> scales(x.size());
    for (std::size_t i = 0; i < scales.size(); ++i) scales[i] = i + 1;
    ScaleProfile p;
    p.build(x, k_min, std::move(scales), true, exec);
    return p;
}

ScaleProfile ScaleProfile::restricted(std::span<const double> x, double ratio, std::size_t k_min,
                                      Execution exec) {
    check_input(x, k_min);
    ScaleProfile p;
    p.build(x, k_min, geometric_scales(x.size(), ratio), false, exec);
    return p;
}

std::size_t ScaleProfile::locate(std::size_t ell, double target) const {
    const std::size_t n_obs = n();
    const double c = kernels::centring(ell, prefix_[n_obs], static_cast<double>(n_obs));
    for (std::size_t k = k_min_; k + ell <= n_obs; ++k)
        if (std::abs((prefix_[k + ell] - prefix_[k]) - c) == target) return k;
    return k_min_;
}

ScanResult ScaleProfile::evaluate(double alpha) const {
    check_alpha(alpha);
    ScanResult r;
    r.alpha = alpha;
    r.k_min = k_min_;
    r.exact = exact_;
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t s = 0; s < scales_.size(); ++s) {
        const double weight = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(scales_[s]), -alpha);
        const double v = weight * maxima_[s];
        if (v > best) {
            best = v;
            best_index = s;
        }
    }
    r.value = best;
    r.ell_hat = scales_[best_index];
    r.k_hat = locate(r.ell_hat, maxima_[best_index]);
    return r;
}

ScanResult scan_statistic(std::span<const double> x, double alpha, std::size_t k_min, Execution exec) {
    check_alpha(alpha);
    return ScaleProfile::exact(x, k_min, exec).evaluate(alpha);
}

ScanResult scan_statistic_restricted(std::span<const double> x, double alpha, double ratio, std::size_t k_min,
                                     Execution exec) {
    check_alpha(alpha);
    return ScaleProfile::restricted(x, ratio, k_min, exec).evaluate(alpha);
}

double holder_norm_polygonal(std::span<const double> x, double alpha) {
    check_alpha(alpha);
    check_input(x, 0);
    const std::size_t n = x.size();
    const auto nl = static_cast<long double>(n);
    // Vertex values of the bridge polygon, accumulated in extended precision.
    std::vector<long double> partial(n + 1, 0.0L);
    for (std::size_t k = 0; k < n; ++k) partial[k + 1] = partial[k] + static_cast<long double>(x[k]);
    const long double total = partial[n];
    std::vector<long double> vertex(n + 1);
    for (std::size_t k = 0; k <= n; ++k) vertex[k] = partial[k] - static_cast<long double>(k) / nl * total;

    long double best = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            const long double dt = static_cast<long double>(j - i) / nl;
            const long double v = std::fabs(vertex[j] - vertex[i]) / std::pow(dt, static_cast<long double>(alpha));
            if (v > best) best = v;
        }
    }
    // |f(0)| is zero for the bridge polygon, so the norm is the seminorm.
    return static_cast<double>(best);
}

double normalized_statistic(double statistic, double alpha, const Normalization& mode) {
    check_alpha(alpha);
    if (!(statistic >= 0.0)) throw DomainError("statistic must be non-negative");
    if (const auto* light = std::get_if<LightTail>(&mode)) {
        if (!(light->sigma > 0.0)) throw DomainError("light-tail normalisation needs sigma > 0");
        if (light->n == 0) throw DomainError("light-tail normalisation needs n >= 1");
        return std::pow(static_cast<double>(light->n), alpha - 0.5) / light->sigma * statistic;
    }
    const auto& heavy = std::get<HeavyTail>(mode);
    if (!(heavy.b_n > 0.0)) throw DomainError("heavy-tail normalisation needs b_n > 0");
    return statistic / heavy.b_n;
}

double normalized_statistic(std::span<const double> x, double alpha, const Normalization& mode,
                            std::size_t k_min) {
    return normalized_statistic(scan_statistic(x, alpha, k_min).value, alpha, mode);
}

}  // namespace episcan
