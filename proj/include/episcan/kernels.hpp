#pragma once

// Low-level kernels behind the uniform-increments statistic.
//
// All kernels work on the centred prefix array Q[0..n] of the input,
// Q[k] = sum_{j<=k} (x_j - mean), and compute for every requested scale l
//
//     M(l) = max_{k_min <= k <= n-l} | (Q[k+l] - Q[k]) - l * Q[n] / n |.
//
// The three variants return bit-identical results: the per-scale reduction
// is a max/min, which is exact and order independent, and the centring
// constant is evaluated by the same expression everywhere.

#include <cstddef>
#include <span>

namespace episcan::kernels {

/// Compensated (Neumaier) prefix sums of x - mean(x). out.size() == x.size() + 1.
void centred_prefix(std::span<const double> x, std::span<double> out);

/// Centring constant for scale l; shared by all kernels so they round alike.
inline double centring(std::size_t ell, double total, double n) {
    return static_cast<double>(ell) * total / n;
}

/// Plain scalar loops, one |.| per window. Kept as the test reference.
void scale_maxima_reference(std::span<const double> prefix, std::size_t k_min,
                            std::span<const std::size_t> scales, std::span<double> out);

/// Single-threaded SIMD kernel: per scale a max/min reduction of the raw
/// window sums, folded with the centring term afterwards.
void scale_maxima_simd(std::span<const double> prefix, std::size_t k_min,
                       std::span<const std::size_t> scales, std::span<double> out);

/// OpenMP-parallel over scales, SIMD inside.
void scale_maxima_parallel(std::span<const double> prefix, std::size_t k_min,
                           std::span<const std::size_t> scales, std::span<double> out);

}  // namespace episcan::kernels
