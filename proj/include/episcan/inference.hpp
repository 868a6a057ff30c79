#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "episcan/innovations.hpp"
#include "episcan/limits.hpp"
#include "episcan/scan.hpp"

namespace episcan {

/// Least-squares AR(1) fit without intercept.
struct FitResult {
    double phi_hat = 0.0;
    std::vector<double> residuals;  ///< e_hat_k = y_k - phi_hat y_{k-1}, k = 1..n
    double sigma_hat = 0.0;         ///< sample standard deviation of residuals (divisor n-1)
    double denominator = 0.0;       ///< sum_{k=1}^n y_{k-1}^2
};

/// y holds y_0..y_n. Requires n >= 2 and a non-zero denominator; throws
/// DegenerateSeries otherwise.
FitResult fit_ar1(std::span<const double> y);

/// Innovations in L_2 or the little-o weak-L_p class: calibrate against the
/// simulated Brownian functional. Valid for alpha <= 1/2 - 1/p.
struct LightTailMode {
    double p = 2.0;  ///< declared tail exponent, +inf for all moments
};

/// Regularly varying innovations with index p: Frechet calibration, valid
/// for alpha > 1/2 - 1/p. b_n is taken as given, else computed from `spec`.
struct HeavyTailMode {
    double p = 3.0;
    std::optional<double> b_n;
    std::optional<InnovationSpec> spec;
};

using TestMode = std::variant<LightTailMode, HeavyTailMode>;

enum class Decision { Reject, Accept };

struct TestOptions {
    double alpha = 0.0;
    TestMode mode = LightTailMode{};
    double level = 0.05;
    std::size_t k_min = 0;
};

struct TestReport {
    ScanResult statistic;  ///< T_hat on residuals; (k_hat, ell_hat) is an informal localisation
    double normalized = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    Decision decision = Decision::Accept;
    bool heavy_tail = false;
    double level = 0.05;
    std::size_t n = 0;
    double phi_hat = 0.0;
    double sigma_hat = 0.0;
    double normalizer = 1.0;  ///< sigma_hat (light) or b_n (heavy)
    double tail_p = 2.0;
    std::optional<CalibrationKey> calibration;  ///< light tail only
};

std::string mode_name(const TestMode& mode);

/// Throws ConfigError when alpha is outside the regime of the mode.
void check_mode(double alpha, const TestMode& mode);

/// Full test on an observed path y_0..y_n. LightTail needs `table` to hold
/// an entry for alpha (CalibrationRequired otherwise).
TestReport run_test(std::span<const double> y, const TestOptions& options, const CriticalValueTable* table);

/// Decision from an already fitted model and a profile of its residuals.
/// Lets Monte Carlo loops score several alphas from one kernel pass.
TestReport decide(const FitResult& fit, const ScaleProfile& residual_profile, const TestOptions& options,
                  const CriticalValueTable* table);

/// 1/2 |a| l^(1-alpha): deterministic lower bound of T_{alpha,n}(a 1_{I*})
/// for l* <= n/2.
double epidemic_lower_bound(double amplitude, std::size_t ell_star, double alpha);

/// 5 |a| l^(1-alpha) / (1 - phi): upper bound of T_{alpha,n}(tau_0..tau_{n-1}).
double tau_scan_upper_bound(double amplitude, std::size_t ell_star, double alpha, double phi);

/// Hill estimate of the tail index from the k largest |x|. Diagnostic only;
/// the test uses the declared p.
double hill_estimator(std::span<const double> x, std::size_t k);

}  // namespace episcan
