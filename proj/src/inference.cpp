#include "episcan/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "episcan/error.hpp"

namespace episcan {

FitResult fit_ar1(std::span<const double> y) {
    if (y.size() < 3) throw DomainError("fit_ar1: need y_0..y_n with n >= 2");
    const std::size_t n = y.size() - 1;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (!std::isfinite(y[k])) throw DataError("fit_ar1: series contains a non-finite value");
        num += y[k] * y[k - 1];
        den += y[k - 1] * y[k - 1];
    }
    if (!(den > 0.0)) throw DegenerateSeries("fit_ar1: sum of squared lagged values is zero");

    FitResult fit;
    fit.phi_hat = num / den;
    fit.denominator = den;
    fit.residuals.resize(n);
    double mean = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        fit.residuals[k - 1] = y[k] - fit.phi_hat * y[k - 1];
        mean += fit.residuals[k - 1];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double r : fit.residuals) ss += (r - mean) * (r - mean);
    fit.sigma_hat = std::sqrt(ss / static_cast<double>(n - 1));
    return fit;
}

std::string mode_name(const TestMode& mode) {
    return std::holds_alternative<LightTailMode>(mode) ? "light_tail" : "heavy_tail";
}

void check_mode(double alpha, const TestMode& mode) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    if (const auto* light = std::get_if<LightTailMode>(&mode)) {
        if (std::isnan(light->p) || light->p < 2.0) throw ConfigError("light-tail mode needs p >= 2");
        const double ap = alpha_p(light->p);
        if (alpha > ap)
            throw ConfigError("alpha = " + std::to_string(alpha) + " exceeds alpha_p = " + std::to_string(ap) +
                              "; the light-tail calibration does not apply");
        return;
    }
    const auto& heavy = std::get<HeavyTailMode>(mode);
    if (!(heavy.p >= 2.0) || !std::isfinite(heavy.p)) throw ConfigError("heavy-tail mode needs a finite p >= 2");
    const double ap = alpha_p(heavy.p);
    if (alpha <= ap)
        throw ConfigError("alpha = " + std::to_string(alpha) + " does not exceed alpha_p = " + std::to_string(ap) +
                          "; the Frechet calibration does not apply");
    if (!heavy.b_n && !heavy.spec) throw ConfigError("heavy-tail mode needs b_n or an innovation spec");
    if (heavy.b_n && !(*heavy.b_n > 0.0)) throw ConfigError("heavy-tail mode needs b_n > 0");
}

TestReport decide(const FitResult& fit, const ScaleProfile& profile, const TestOptions& opt,
                  const CriticalValueTable* table) {
    check_mode(opt.alpha, opt.mode);
    if (!(opt.level > 0.0 && opt.level < 1.0)) throw ConfigError("level must lie in (0, 1)");

    TestReport rep;
    rep.statistic = profile.evaluate(opt.alpha);
    rep.level = opt.level;
    rep.n = profile.n();
    rep.phi_hat = fit.phi_hat;
    rep.sigma_hat = fit.sigma_hat;

    if (const auto* light = std::get_if<LightTailMode>(&opt.mode)) {
        if (table == nullptr) throw CalibrationRequired("light-tail test needs a critical-value table");
        const CalibrationEntry& entry = table->find(opt.alpha);
        if (!(fit.sigma_hat > 0.0)) throw DegenerateSeries("residual standard deviation is zero");
        rep.tail_p = light->p;
        rep.normalizer = fit.sigma_hat;
        rep.normalized = normalized_statistic(rep.statistic.value, opt.alpha, LightTail{fit.sigma_hat, rep.n});
        rep.critical_value = entry.quantile(1.0 - opt.level);
        rep.p_value = entry.exceedance(rep.normalized);
        rep.calibration = entry.key;
    } else {
        const auto& heavy = std::get<HeavyTailMode>(opt.mode);
        const double b_n = heavy.b_n ? *heavy.b_n : quantile_b_n(*heavy.spec, rep.n);
        rep.heavy_tail = true;
        rep.tail_p = heavy.p;
        rep.normalizer = b_n;
        rep.normalized = normalized_statistic(rep.statistic.value, opt.alpha, HeavyTail{b_n});
        rep.critical_value = frechet_quantile(heavy.p, 1.0 - opt.level);
        rep.p_value = rep.normalized > 0.0 ? -std::expm1(-std::pow(rep.normalized, -heavy.p)) : 1.0;
    }
    rep.decision = rep.normalized > rep.critical_value ? Decision::Reject : Decision::Accept;
    return rep;
}

TestReport run_test(std::span<const double> y, const TestOptions& opt, const CriticalValueTable* table) {
    check_mode(opt.alpha, opt.mode);
    const FitResult fit = fit_ar1(y);
    const auto profile = ScaleProfile::exact(fit.residuals, opt.k_min);
    return decide(fit, profile, opt, table);
}

double epidemic_lower_bound(double amplitude, std::size_t ell_star, double alpha) {
    if (ell_star < 1) throw DomainError("epidemic_lower_bound: ell_star must be at least 1");
    return 0.5 * std::abs(amplitude) * std::pow(static_cast<double>(ell_star), 1.0 - alpha);
}

double tau_scan_upper_bound(double amplitude, std::size_t ell_star, double alpha, double phi) {
    if (!(phi > 0.0 && phi < 1.0)) throw DomainError("tau_scan_upper_bound: phi must lie in (0, 1)");
    if (ell_star < 1) throw DomainError("tau_scan_upper_bound: ell_star must be at least 1");
    return 5.0 * std::abs(amplitude) * std::pow(static_cast<double>(ell_star), 1.0 - alpha) / (1.0 - phi);
}

double hill_estimator(std::span<const double> x, std::size_t k) {
    if (k < 1 || k >= x.size()) throw DomainError("hill_estimator: need 1 <= k < n");
    std::vector<double> mag(x.size());
    std::transform(x.begin(), x.end(), mag.begin(), [](double v) { return std::abs(v); });
    std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(k), mag.end(), std::greater<>());
    const double threshold = mag[k];
    if (!(threshold > 0.0)) throw DomainError("hill_estimator: threshold order statistic is zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(mag[i] / threshold);
    return static_cast<double>(k) / acc;
}

}  // namespace episcan
