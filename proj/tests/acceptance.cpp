// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Critical-value tables are cached in --cache-dir.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "episcan/ar1.hpp"
#include "episcan/config.hpp"
#include "episcan/experiments.hpp"
#include "episcan/inference.hpp"
#include "episcan/innovations.hpp"
#include "episcan/limits.hpp"
#include "episcan/rng.hpp"
#include "episcan/scan.hpp"
#include "oracles.hpp"

using namespace episcan;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const ModelSpec kFixed = FixedPhi{0.5};
const ModelSpec kRootN = NearUnit{NearUnit::Schedule::PowerLaw, 1.0, 0.5};
constexpr std::uint64_t kSeed = 20140301;

struct Context {
    CalibrationSettings calibration;
    CriticalValueTable table;
    // Largest gap violation seen by the residual check, accumulated over
    // every bundle simulated by the Monte Carlo criteria.
    std::size_t gap_bundles = 0;
    std::size_t gap_violations = 0;
    double gap_worst = 0.0;
};

// |T(e_hat) - T(e + a)| <= |phi_hat - phi| T(y_0..y_{n-1}) for alpha in {0, 0.25}.
void check_residual_gap(Context& ctx, const ExperimentConfig& cfg, std::size_t n, const EpidemicSpec& e) {
    const double phi = resolve_phi(cfg.model, n);
    std::size_t violations = 0;
    double worst = 0.0;
    const auto count = static_cast<std::ptrdiff_t>(cfg.reps);
#pragma omp parallel for schedule(dynamic, 2) reduction(+ : violations) reduction(max : worst)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        const auto eps = sample_innovations(cfg.innovation, n,
                                            replicate_stream(cfg.seed, n, static_cast<std::size_t>(r), StreamRole::Innovations));
        const SeriesBundle b = simulate(phi, e, eps);
        const FitResult fit = fit_ar1(b.y);
        std::vector<double> shifted(n);
        for (std::size_t k = 1; k <= n; ++k) shifted[k - 1] = eps[k - 1] + e.drift_at(k);
        const auto p_hat = ScaleProfile::exact(fit.residuals, 0, Execution::Vectorized);
        const auto p_true = ScaleProfile::exact(shifted, 0, Execution::Vectorized);
        const auto p_y = ScaleProfile::exact(std::span(b.y).first(n), 0, Execution::Vectorized);
        for (double alpha : {0.0, 0.25}) {
            const double lhs = std::abs(p_hat.evaluate(alpha).value - p_true.evaluate(alpha).value);
            const double rhs = std::abs(fit.phi_hat - phi) * p_y.evaluate(alpha).value;
            const double slack = 1e-10 * std::max(1.0, p_true.evaluate(alpha).value);
            if (lhs > rhs + slack) ++violations;
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
    }
    ctx.gap_bundles += cfg.reps;
    ctx.gap_violations += violations;
    ctx.gap_worst = std::max(ctx.gap_worst, worst);
}

std::vector<double> mixed_vector(std::uint64_t seed, std::size_t n, int family) {
    const StreamId id = derive_stream(seed, n, StreamRole::Auxiliary);
    switch (family % 4) {
        case 0: return sample_innovations(Gaussian{1.0}, n, id);
        case 1: return sample_innovations(SymmetricPareto{2.5, 0.3}, n, id);
        case 2: return sample_innovations(StudentT{3.0}, n, id);
        default: {
            Stream rng(id);
            std::vector<double> v(n);
            for (double& x : v) x = 100.0 * rng.uniform_signed() + 7.0;
            return v;
        }
    }
}

Outcome holder_identity(Context&) {
    Stream pick(derive_stream(kSeed, 1, StreamRole::Auxiliary));
    double worst = 0.0;
    std::size_t cases = 0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(pick.next_u64() % 299);
        const auto x = mixed_vector(kSeed + static_cast<std::uint64_t>(i), n, i);
        const auto profile = ScaleProfile::exact(x, 0);
        for (double alpha : {0.0, 0.1, 0.25, 0.4}) {
            const double holder = holder_norm_polygonal(x, alpha);
            const double scaled = std::pow(static_cast<double>(n), alpha) * profile.evaluate(alpha).value;
            worst = std::max(worst, std::abs(holder - scaled) / std::max(holder, 1e-300));
            ++cases;
        }
    }
    return {worst <= 1e-10, fmt("%zu cases, worst relative error %.3g (tolerance 1e-10)", cases, worst)};
}

Outcome brute_force(Context&) {
    std::size_t cases = 0, mismatches = 0;
    for (std::size_t n = 1; n <= 64; ++n) {
        // Integer fixtures with sum divisible by n: every centring term is exact.
        Stream rng(derive_stream(kSeed, n, StreamRole::Auxiliary));
        std::vector<double> x(n);
        long long sum = 0;
        for (double& v : x) {
            v = static_cast<double>(static_cast<long long>(rng.next_u64() % 41) - 20);
            sum += static_cast<long long>(v);
        }
        const auto nn = static_cast<long long>(n);
        x.back() -= static_cast<double>(((sum % nn) + nn) % nn);
        for (std::size_t k_min : {0u, 1u}) {
            for (double alpha : {0.0, 0.1, 0.25, 0.4, 0.75}) {
                const auto oracle = oracles::enumerate_windows(x, alpha, k_min);
                for (Execution exec : {Execution::Reference, Execution::Vectorized, Execution::Parallel}) {
                    const ScanResult r = scan_statistic(x, alpha, k_min, exec);
                    ++cases;
                    const bool same_window = oracle.value == 0.0 || (r.k_hat == oracle.k && r.ell_hat == oracle.ell);
                    if (r.value != oracle.value || !same_window) ++mismatches;
                }
            }
        }
    }
    return {mismatches == 0, fmt("%zu fixtures x kernels, %zu mismatches", cases, mismatches)};
}

Outcome bounds(Context&) {
    const BoundsReport report = verify_bounds();
    std::string detail = fmt("%zu grid points;", report.configurations);
    for (const auto& c : report.checks) detail += fmt(" %s %zu/%zu", c.name.c_str(), c.violations, c.evaluated);
    return {report.passed() && report.configurations >= 200, detail + " (violations/evaluated)"};
}

ExperimentConfig gaussian_config(const Context& ctx, const ModelSpec& model, std::size_t reps,
                                 std::vector<double> alphas) {
    ExperimentConfig cfg;
    cfg.model = model;
    cfg.innovation = Gaussian{1.0};
    cfg.alphas = std::move(alphas);
    cfg.reps = reps;
    cfg.level = 0.05;
    cfg.seed = kSeed;
    cfg.calibration = ctx.calibration;
    return cfg;
}

Outcome size(Context& ctx) {
    bool ok = true;
    std::string detail;
    for (const auto& [name, model] : {std::pair{"phi=0.5", kFixed}, std::pair{"gamma=sqrt(n)", kRootN}}) {
        const ExperimentConfig cfg = gaussian_config(ctx, model, 2000, {0.0, 0.25});
        const auto res = run_replicates(cfg, 2000, EpidemicSpec{}, &ctx.table);
        check_residual_gap(ctx, cfg, 2000, EpidemicSpec{});
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            const double rate = res.rejection_rate(i);
            ok = ok && rate >= 0.03 && rate <= 0.07;
            detail += fmt("%s alpha=%g rate=%.4f; ", name, cfg.alphas[i], rate);
        }
    }
    return {ok, detail + "band [0.03, 0.07]"};
}

Outcome estimator_rate(Context& ctx) {
    bool ok = true;
    std::string detail;
    const std::size_t n = 5000;
    for (const auto& [name, model] : {std::pair{"phi=0.5", kFixed}, std::pair{"gamma=sqrt(n)", kRootN}}) {
        const ExperimentConfig cfg = gaussian_config(ctx, model, 2000, {0.0});
        const double phi = resolve_phi(model, n);
        const auto res = run_replicates(cfg, n, EpidemicSpec{}, &ctx.table);
        check_residual_gap(ctx, cfg, n, EpidemicSpec{});
        std::vector<double> z(res.phi_hat.size());
        const double scale = std::sqrt(static_cast<double>(n) / (1.0 - phi * phi));
        std::transform(res.phi_hat.begin(), res.phi_hat.end(), z.begin(),
                       [&](double ph) { return scale * std::abs(ph - phi); });
        std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(z.size() / 2), z.end());
        const double median = z[z.size() / 2];
        ok = ok && median >= 0.55 && median <= 0.80;
        detail += fmt("%s median=%.4f; ", name, median);
    }
    return {ok, detail + "band [0.55, 0.80], |N(0,1)| median 0.6745"};
}

Outcome frechet(Context&) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double p = 0.5 + 0.75 * i;
        for (int j = 1; j <= 10; ++j) {
            const double q = (j - 0.5) / 10.0;
            worst = std::max(worst, std::abs(frechet_cdf(p, frechet_quantile(p, q)) - q) / q);
        }
    }

    const std::size_t n = 100000, reps = 2000;
    const double alpha = 0.4, p = 3.0, ratio = 1.25;
    const SymmetricPareto spec{p, 0.5};
    const double b_n = quantile_b_n(spec, n);
    std::vector<double> sample(reps);
    const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        const auto eps = sample_innovations(spec, n, replicate_stream(kSeed, n, static_cast<std::size_t>(r), StreamRole::Heavy));
        const auto profile = ScaleProfile::restricted(eps, ratio, 0, Execution::Vectorized);
        sample[static_cast<std::size_t>(r)] = profile.evaluate(alpha).value / b_n;
    }
    std::sort(sample.begin(), sample.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const double f = frechet_cdf(p, sample[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / reps), std::abs(f - static_cast<double>(i + 1) / reps)});
    }
    return {worst <= 1e-12 && ks < 0.1,
            fmt("inverse identity worst %.3g (tolerance 1e-12); KS distance %.4f (tolerance 0.1), restricted scales ratio %.2f",
                worst, ks, ratio)};
}

Outcome consistency(Context& ctx) {
    const std::vector<std::size_t> ns{1000, 2000, 5000, 10000};
    ExperimentConfig cfg = gaussian_config(ctx, kRootN, 2000, {0.25, 0.0});
    cfg.ns = ns;
    cfg.betas = {0.4};
    cfg.thetas = {1.0};
    cfg.amplitudes = {1.0};
    cfg.k_star_fraction = 0.5;

    std::vector<double> median, rate, rate_cusum;
    std::string detail;
    for (std::size_t n : ns) {
        const EpidemicSpec e = sweep_epidemic(cfg, n, 0.4, 1.0, 1.0);
        const auto res = run_replicates(cfg, n, e, &ctx.table);
        check_residual_gap(ctx, cfg, n, e);
        median.push_back(res.median_normalized(0));
        rate.push_back(res.rejection_rate(0));
        rate_cusum.push_back(res.rejection_rate(1));
        detail += fmt("n=%zu l*=%zu median=%.4f rate=%.4f cusum_rate=%.4f; ", n, e.ell_star, median.back(), rate.back(),
                      rate_cusum.back());
    }
    int inversions = 0;
    for (std::size_t i = 1; i < median.size(); ++i)
        if (median[i] < median[i - 1]) ++inversions;
    const double gain = rate.back() - rate.front();
    const double size_se = std::sqrt(cfg.level * (1.0 - cfg.level) / static_cast<double>(cfg.reps));
    const bool cusum_weaker = rate_cusum.back() < 0.5 * rate.back();
    const bool cusum_at_size = std::abs(rate_cusum.back() - cfg.level) <= 2.0 * size_se;
    const bool ok = inversions <= 1 && gain >= 0.3 && (cusum_weaker || cusum_at_size);
    detail += fmt("inversions=%d (max 1); rate gain %.4f (min 0.3); cusum %s", inversions, gain,
                  cusum_weaker ? "below half" : (cusum_at_size ? "at nominal size" : "not weaker"));
    return {ok, detail};
}

Outcome residual_gap(Context& ctx) {
    return {ctx.gap_bundles > 0 && ctx.gap_violations == 0,
            fmt("%zu bundles x 2 alphas, %zu violations, largest lhs/rhs %.4f", ctx.gap_bundles, ctx.gap_violations,
                ctx.gap_worst)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string cache_dir;
    app.add_option("--cache-dir", cache_dir, "directory for cached critical-value tables");
    CLI11_PARSE(app, argc, argv);

    Context ctx;
    ctx.calibration = CalibrationSettings{2048, 10000, kSeed, cache_dir};
    const double alphas[] = {0.0, 0.25};
    const auto t0 = std::chrono::steady_clock::now();
    ctx.table = calibrate_table(alphas, ctx.calibration);
    std::printf("calibration: grid_n=2048 reps=10000 seed=%llu, 95%% quantiles alpha=0: %.4f alpha=0.25: %.4f (%.1f s)\n",
                static_cast<unsigned long long>(kSeed), ctx.table.find(0.0).quantile(0.95),
                ctx.table.find(0.25).quantile(0.95),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);

    const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria{
        {"1 Hoelder-norm identity", holder_identity},
        {"2 brute-force equivalence", brute_force},
        {"3 deterministic bounds", bounds},
        {"4 size under H0", size},
        {"5 estimator rate", estimator_rate},
        {"6 Frechet calibration", frechet},
        {"7 consistency trend", consistency},
        {"8 residual-innovation gap", residual_gap},
    };

    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.passed) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
