#include "episcan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "episcan/ar1.hpp"
#include "episcan/error.hpp"
#include "episcan/inference.hpp"
#include "episcan/innovations.hpp"
#include "episcan/io.hpp"
#include "episcan/rng.hpp"
#include "episcan/scan.hpp"

namespace episcan {

CriticalValueTable calibrate_table(std::span<const double> alphas, const CalibrationSettings& settings) {
    CriticalValueTable table;
    std::vector<double> missing;
    for (double a : alphas) {
        const CalibrationKey key{a, settings.grid_n, settings.reps, settings.seed};
        if (!settings.cache_dir.empty()) {
            const auto path = calibration_cache_path(settings.cache_dir, key);
            if (std::filesystem::exists(path)) {
                try {
                    CalibrationEntry cached = load_calibration(path);
                    if (cached.key.matches(key)) {
                        table.add(std::move(cached));
                        continue;
                    }
                } catch (const Error&) {
                    // recompute below
                }
            }
        }
        if (std::find(missing.begin(), missing.end(), a) == missing.end()) missing.push_back(a);
    }
    if (missing.empty()) return table;

    auto samples = simulate_limit_law(missing, settings.grid_n, settings.reps, settings.seed);
    for (std::size_t i = 0; i < missing.size(); ++i) {
        CalibrationEntry e;
        e.key = CalibrationKey{missing[i], settings.grid_n, settings.reps, settings.seed};
        e.sample = std::move(samples[i]);
        if (!settings.cache_dir.empty()) save_calibration(e, calibration_cache_path(settings.cache_dir, e.key));
        table.add(std::move(e));
    }
    return table;
}

StreamId replicate_stream(std::uint64_t seed, std::size_t n, std::size_t replicate, StreamRole role) {
    return derive_stream(seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(replicate), role);
}

double ReplicateOutcomes::rejection_rate(std::size_t i) const {
    const auto& r = rejected.at(i);
    if (r.empty()) return 0.0;
    return static_cast<double>(std::count(r.begin(), r.end(), 1)) / static_cast<double>(r.size());
}

double ReplicateOutcomes::median_normalized(std::size_t i) const {
    std::vector<double> v = normalized.at(i);
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

ReplicateOutcomes run_replicates(const ExperimentConfig& cfg, std::size_t n, const EpidemicSpec& epidemic,
                                 const CriticalValueTable* table) {
    const double phi = resolve_phi(cfg.model, n);
    validate(epidemic, n);
    const TestMode mode = make_mode(cfg);
    const std::size_t m = cfg.alphas.size();
    for (double a : cfg.alphas) check_mode(a, mode);
    if (std::holds_alternative<LightTailMode>(mode)) {
        if (table == nullptr) throw CalibrationRequired("light-tail experiment needs a calibration table");
        for (double a : cfg.alphas) (void)table->find(a);
    }

    ReplicateOutcomes out;
    out.normalized.assign(m, std::vector<double>(cfg.reps, 0.0));
    out.rejected.assign(m, std::vector<char>(cfg.reps, 0));
    out.phi_hat.assign(cfg.reps, 0.0);
    const auto count = static_cast<std::ptrdiff_t>(cfg.reps);

#pragma omp parallel
    {
        std::vector<double> eps(n);
        std::vector<double> y(n + 1);
#pragma omp for schedule(dynamic, 2)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            sample_innovations_into(cfg.innovation, eps, replicate_stream(cfg.seed, n, rep, StreamRole::Innovations));
            simulate_path_into(phi, epidemic, eps, y);
            const FitResult fit = fit_ar1(y);
            const auto profile = ScaleProfile::exact(fit.residuals, cfg.k_min, Execution::Vectorized);
            out.phi_hat[rep] = fit.phi_hat;
            for (std::size_t i = 0; i < m; ++i) {
                TestOptions opt;
                opt.alpha = cfg.alphas[i];
                opt.mode = mode;
                opt.level = cfg.level;
                opt.k_min = cfg.k_min;
                const TestReport rpt = decide(fit, profile, opt, table);
                out.normalized[i][rep] = rpt.normalized;
                out.rejected[i][rep] = rpt.decision == Decision::Reject ? 1 : 0;
            }
        }
    }
    return out;
}

std::vector<SizeRow> run_size(const ExperimentConfig& cfg, const CriticalValueTable* table) {
    validate_test_settings(cfg);
    std::vector<SizeRow> rows;
    const EpidemicSpec null_epidemic{};
    for (std::size_t n : cfg.ns) {
        const ReplicateOutcomes res = run_replicates(cfg, n, null_epidemic, table);
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            SizeRow row;
            row.n = n;
            row.alpha = cfg.alphas[i];
            row.level = cfg.level;
            row.rejection_rate = res.rejection_rate(i);
            row.reps = cfg.reps;
            row.mc_stderr = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / static_cast<double>(cfg.reps));
            rows.push_back(row);
        }
    }
    return rows;
}

EpidemicSpec sweep_epidemic(const ExperimentConfig& cfg, std::size_t n, double beta, double theta, double amplitude) {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
    if (!(cfg.k_star_fraction >= 0.0 && cfg.k_star_fraction < 1.0))
        throw ConfigError("k_star_fraction must lie in [0, 1)");
    EpidemicSpec e;
    e.ell_star = static_cast<std::size_t>(std::ceil(theta * std::pow(static_cast<double>(n), beta) - 1e-9));
    e.ell_star = std::max<std::size_t>(e.ell_star, 1);
    if (2 * e.ell_star > n)
        throw ConfigError("epidemic length " + std::to_string(e.ell_star) + " exceeds n/2 for n = " + std::to_string(n));
    e.k_star = static_cast<std::size_t>(std::floor(cfg.k_star_fraction * static_cast<double>(n)));
    e.k_star = std::min(e.k_star, n - e.ell_star);
    e.amplitude = amplitude;
    return e;
}

std::vector<PowerRow> run_power(const ExperimentConfig& cfg, const CriticalValueTable* table) {
    validate_test_settings(cfg);
    if (cfg.betas.empty() || cfg.thetas.empty() || cfg.amplitudes.empty())
        throw ConfigError("power sweep needs beta, theta and amplitude lists");
    for (std::size_t n : cfg.ns)
        for (double beta : cfg.betas)
            for (double theta : cfg.thetas)
                for (double a : cfg.amplitudes) (void)sweep_epidemic(cfg, n, beta, theta, a);

    std::vector<PowerRow> rows;
    for (std::size_t n : cfg.ns) {
        for (double beta : cfg.betas) {
            for (double theta : cfg.thetas) {
                for (double a : cfg.amplitudes) {
                    const EpidemicSpec e = sweep_epidemic(cfg, n, beta, theta, a);
                    const ReplicateOutcomes res = run_replicates(cfg, n, e, table);
                    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
                        rows.push_back(PowerRow{n, cfg.alphas[i], beta, theta, a, res.rejection_rate(i), e.ell_star,
                                                cfg.reps});
                    }
                }
            }
        }
    }
    return rows;
}

std::vector<ConsistencyRow> run_consistency(const ExperimentConfig& cfg, const CriticalValueTable* table) {
    validate_test_settings(cfg);
    if (cfg.betas.empty() || cfg.thetas.empty() || cfg.amplitudes.empty())
        throw ConfigError("consistency run needs beta, theta and amplitude");
    const double beta = cfg.betas.front();
    const double theta = cfg.thetas.front();
    const double a = cfg.amplitudes.front();
    for (std::size_t n : cfg.ns) (void)sweep_epidemic(cfg, n, beta, theta, a);

    std::vector<ConsistencyRow> rows;
    for (std::size_t n : cfg.ns) {
        const EpidemicSpec e = sweep_epidemic(cfg, n, beta, theta, a);
        const double phi = resolve_phi(cfg.model, n);
        const ReplicateOutcomes res = run_replicates(cfg, n, e, table);
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            const double alpha = cfg.alphas[i];
            ConsistencyRow row;
            row.n = n;
            row.alpha = alpha;
            row.ell_star = e.ell_star;
            row.median_normalized = res.median_normalized(i);
            row.rejection_rate = res.rejection_rate(i);
            row.lemma_ratio = a * a * static_cast<double>(e.ell_star) / (static_cast<double>(n) * (1.0 - phi));
            const double bound = epidemic_lower_bound(a, e.ell_star, alpha);
            if (cfg.heavy_tail) {
                const double b_n = cfg.b_n ? *cfg.b_n : quantile_b_n(cfg.innovation, n);
                row.normalized_lower_bound = bound / b_n;
            } else {
                row.normalized_lower_bound =
                    bound * std::pow(static_cast<double>(n), alpha - 0.5) / std::sqrt(variance(cfg.innovation));
            }
            row.reps = cfg.reps;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_size_csv(std::ostream& os, std::span<const SizeRow> rows) {
    os << "n,alpha,level,empirical_rejection_rate,reps,mc_stderr\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.alpha) << ',' << format_double(r.level) << ','
           << format_double(r.rejection_rate) << ',' << r.reps << ',' << format_double(r.mc_stderr) << '\n';
}

void write_power_csv(std::ostream& os, std::span<const PowerRow> rows) {
    os << "n,alpha,beta,theta,a,rejection_rate,ell_star,reps\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << format_double(r.theta)
           << ',' << format_double(r.amplitude) << ',' << format_double(r.rejection_rate) << ',' << r.ell_star << ','
           << r.reps << '\n';
}

void write_consistency_csv(std::ostream& os, std::span<const ConsistencyRow> rows) {
    os << "n,normalized_statistic_median,alpha,ell_star,rejection_rate,lemma_condition_ratio,"
          "normalized_lower_bound,reps\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.median_normalized) << ',' << format_double(r.alpha) << ','
           << r.ell_star << ',' << format_double(r.rejection_rate) << ',' << format_double(r.lemma_ratio) << ','
           << format_double(r.normalized_lower_bound) << ',' << r.reps << '\n';
}

bool BoundsReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed(); });
}

namespace {

double compensated_sum(std::span<const double> v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s);
}

// Relative slack for comparing a floating-point statistic against a bound.
constexpr double kBoundSlack = 1e-12;

}  // namespace

BoundsReport verify_bounds(const BoundsGrid& grid) {
    BoundCheck upper0{"drift_upper_bound_kmin0"};
    BoundCheck upper1{"drift_upper_bound_kmin1"};
    BoundCheck lower0{"indicator_lower_bound_kmin0"};
    BoundCheck lower1{"indicator_lower_bound_kmin1"};
    BoundCheck lagged{"drift_lagged_sum_closed_form"};
    BoundsReport report;

    for (std::size_t n : grid.ns) {
        for (double frac : grid.ell_fractions) {
            const auto ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(frac * static_cast<double>(n))));
            std::vector<std::size_t> starts{0, 1, (n - ell) / 2, n - ell};
            std::sort(starts.begin(), starts.end());
            starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
            for (std::size_t k_star : starts) {
                for (double a : grid.amplitudes) {
                    const EpidemicSpec e{k_star, ell, a};
                    // Indicator lower bound: independent of phi.
                    std::vector<double> indicator(n, 0.0);
                    for (std::size_t j = k_star; j < k_star + ell; ++j) indicator[j] = a;
                    const auto ind0 = ScaleProfile::exact(indicator, 0, Execution::Vectorized);
                    const auto ind1 = ScaleProfile::exact(indicator, 1, Execution::Vectorized);
                    for (double alpha : grid.alphas) {
                        if (2 * ell > n) continue;
                        const double lb = epidemic_lower_bound(a, ell, alpha);
                        const double v0 = ind0.evaluate(alpha).value;
                        ++lower0.evaluated;
                        if (v0 < lb * (1.0 - kBoundSlack)) ++lower0.violations;
                        lower0.worst = std::max(lower0.worst, lb / v0);
                        if (k_star >= 1) {
                            const double v1 = ind1.evaluate(alpha).value;
                            ++lower1.evaluated;
                            if (v1 < lb * (1.0 - kBoundSlack)) ++lower1.violations;
                            lower1.worst = std::max(lower1.worst, lb / v1);
                        }
                    }
                    for (double phi : grid.phis) {
                        const std::vector<double> tau = drift_tau(phi, e, n);
                        const std::span<const double> lagged_tau(tau.data(), n);  // tau_0..tau_{n-1}
                        const double closed = drift_tau_lagged_sum(phi, e, n);
                        const double direct = compensated_sum(lagged_tau);
                        const double rel = std::abs(closed - direct) / std::max(std::abs(direct), 1e-300);
                        ++lagged.evaluated;
                        if (rel > 1e-10) ++lagged.violations;
                        lagged.worst = std::max(lagged.worst, rel);

                        const auto prof0 = ScaleProfile::exact(lagged_tau, 0, Execution::Vectorized);
                        const auto prof1 = ScaleProfile::exact(lagged_tau, 1, Execution::Vectorized);
                        for (double alpha : grid.alphas) {
                            ++report.configurations;
                            const double ub = tau_scan_upper_bound(a, ell, alpha, phi);
                            const double t0 = prof0.evaluate(alpha).value;
                            const double t1 = prof1.evaluate(alpha).value;
                            ++upper0.evaluated;
                            ++upper1.evaluated;
                            if (t0 > ub * (1.0 + kBoundSlack)) ++upper0.violations;
                            if (t1 > ub * (1.0 + kBoundSlack)) ++upper1.violations;
                            upper0.worst = std::max(upper0.worst, t0 / ub);
                            upper1.worst = std::max(upper1.worst, t1 / ub);
                        }
                    }
                }
            }
        }
    }
    report.checks = {upper0, upper1, lower0, lower1, lagged};
    return report;
}

void write_bounds_report(std::ostream& os, const BoundsReport& report) {
    os << "check,evaluated,violations,worst,result\n";
    for (const auto& c : report.checks)
        os << c.name << ',' << c.evaluated << ',' << c.violations << ',' << format_double(c.worst) << ','
           << (c.passed() ? "pass" : "FAIL") << '\n';
    os << "overall," << report.configurations << ",," << ',' << (report.passed() ? "pass" : "FAIL") << '\n';
}

}  // namespace episcan
