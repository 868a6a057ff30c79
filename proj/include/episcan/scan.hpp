#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace episcan {

/// Value of the uniform-increments statistic and the window attaining it.
///
/// value = ell_hat^-alpha * | S[k_hat + ell_hat] - S[k_hat] - (ell_hat / n) S[n] |
/// with S the prefix sums of the input. The window covers the 1-based
/// observations k_hat+1 .. k_hat+ell_hat.
struct ScanResult {
    double value = 0.0;
    std::size_t k_hat = 0;
    std::size_t ell_hat = 1;
    double alpha = 0.0;
    std::size_t k_min = 0;
    bool exact = true;  ///< false when computed on a restricted scale grid
};

enum class Execution {
    Reference,   ///< scalar loops, test oracle
    Vectorized,  ///< single thread, SIMD
    Parallel,    ///< OpenMP threads over scales
};

/// Scale values ceil(ratio^j), j = 0, 1, ..., deduplicated and capped at n.
/// Always contains 1. Also appends n when the grid does not reach it.
std::vector<std::size_t> geometric_scales(std::size_t n, double ratio);

/// Per-scale maxima of the centred window sums of one input vector.
///
/// The expensive O(n * #scales) pass is done once; evaluate() then yields
/// the statistic for any weight exponent alpha in O(#scales), which lets
/// Monte Carlo loops score several alphas on the same draw.
class ScaleProfile {
public:
    /// All scales 1..n.
    static ScaleProfile exact(std::span<const double> x, std::size_t k_min = 0,
                              Execution exec = Execution::Parallel);

    /// Only the scales of geometric_scales(n, ratio). Approximate: the result
    /// is a lower bound of the exact statistic.
    static ScaleProfile restricted(std::span<const double> x, double ratio, std::size_t k_min = 0,
                                   Execution exec = Execution::Parallel);

    std::size_t n() const { return prefix_.size() - 1; }
    std::size_t k_min() const { return k_min_; }
    bool is_exact() const { return exact_; }
    std::span<const std::size_t> scales() const { return scales_; }
    std::span<const double> maxima() const { return maxima_; }

    /// Statistic for weight exponent alpha; ties go to the smallest scale,
    /// then the smallest window start.
    ScanResult evaluate(double alpha) const;

private:
    ScaleProfile() = default;
    void build(std::span<const double> x, std::size_t k_min, std::vector<std::size_t> scales, bool exact,
               Execution exec);
    std::size_t locate(std::size_t ell, double target) const;

    std::vector<double> prefix_;
    std::vector<std::size_t> scales_;
    std::vector<double> maxima_;
    std::size_t k_min_ = 0;
    bool exact_ = true;
};

/// Exact T_{alpha,n}(x) over all windows with k_min <= k <= n - l, 1 <= l <= n.
/// Throws DomainError on empty input, alpha outside [0, 1) or k_min > 1.
ScanResult scan_statistic(std::span<const double> x, double alpha, std::size_t k_min = 0,
                          Execution exec = Execution::Parallel);

/// Approximate statistic over a geometric scale grid; for very long series.
ScanResult scan_statistic_restricted(std::span<const double> x, double alpha, double ratio,
                                     std::size_t k_min = 0, Execution exec = Execution::Parallel);

/// alpha-Hoelder seminorm of the polygon through (k/n, S_k - (k/n) S_n),
/// k = 0..n, computed by brute force over vertex pairs. Independent of the
/// scan kernels; equals n^alpha * scan_statistic(x, alpha, 0).value.
double holder_norm_polygonal(std::span<const double> x, double alpha);

/// n^{-1/2+alpha} sigma^{-1} T: the light-tail (Brownian) normalisation.
struct LightTail {
    double sigma = 1.0;
    std::size_t n = 1;
};

/// b_n^{-1} T: the heavy-tail (Frechet) normalisation.
struct HeavyTail {
    double b_n = 1.0;
};

using Normalization = std::variant<LightTail, HeavyTail>;

double normalized_statistic(double statistic, double alpha, const Normalization& mode);
double normalized_statistic(std::span<const double> x, double alpha, const Normalization& mode,
                            std::size_t k_min = 0);

}  // namespace episcan
