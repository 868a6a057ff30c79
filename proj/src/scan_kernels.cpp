#include "episcan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace episcan::kernels {
namespace {

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline double fold(double hi, double lo, double c) { return std::max(hi - c, c - lo); }

// Max and min of Q[k+l] - Q[k] over k in [k_min, n-l].
inline void lag_extrema(const double* __restrict q, std::size_t k_min, std::size_t count, std::size_t ell,
                        double& hi_out, double& lo_out) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    const double* __restrict head = q + k_min + ell;
    const double* __restrict tail = q + k_min;
#pragma omp simd reduction(max : hi) reduction(min : lo)
    for (std::size_t i = 0; i < count; ++i) {
        const double d = head[i] - tail[i];
        hi = d > hi ? d : hi;
        lo = d < lo ? d : lo;
    }
    hi_out = hi;
    lo_out = lo;
}

double scale_maximum_simd(std::span<const double> prefix, std::size_t k_min, std::size_t ell) {
    const std::size_t n = prefix.size() - 1;
    if (ell > n || k_min + ell > n) return 0.0;
    const std::size_t count = n - ell - k_min + 1;
    double hi = 0.0, lo = 0.0;
    lag_extrema(prefix.data(), k_min, count, ell, hi, lo);
    return fold(hi, lo, centring(ell, prefix[n], static_cast<double>(n)));
}

}  // namespace

void centred_prefix(std::span<const double> x, std::span<double> out) {
    const std::size_t n = x.size();
    Neumaier total;
    for (double v : x) total.add(v);
    const double mean = total.value() / static_cast<double>(n);
    Neumaier run;
    out[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        run.add(x[k] - mean);
        out[k + 1] = run.value();
    }
}

void scale_maxima_reference(std::span<const double> prefix, std::size_t k_min,
                            std::span<const std::size_t> scales, std::span<double> out) {
    const std::size_t n = prefix.size() - 1;
    const double nd = static_cast<double>(n);
    for (std::size_t s = 0; s < scales.size(); ++s) {
        const std::size_t ell = scales[s];
        const double c = centring(ell, prefix[n], nd);
        double best = 0.0;
        for (std::size_t k = k_min; k + ell <= n; ++k) {
            const double v = std::abs((prefix[k + ell] - prefix[k]) - c);
            if (v > best) best = v;
        }
        out[s] = best;
    }
}

void scale_maxima_simd(std::span<const double> prefix, std::size_t k_min,
                       std::span<const std::size_t> scales, std::span<double> out) {
    for (std::size_t s = 0; s < scales.size(); ++s) out[s] = scale_maximum_simd(prefix, k_min, scales[s]);
}

void scale_maxima_parallel(std::span<const double> prefix, std::size_t k_min,
                           std::span<const std::size_t> scales, std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(scales.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t s = 0; s < count; ++s) out[s] = scale_maximum_simd(prefix, k_min, scales[s]);
}

}  // namespace episcan::kernels
