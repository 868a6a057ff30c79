// episcan: simulate, calibrate and test for epidemic changes in AR(1)
// innovations, and run the size / power / consistency experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 calibration missing,
// 4 data error. Errors are reported on stderr as one JSON object.

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "episcan/ar1.hpp"
#include "episcan/config.hpp"
#include "episcan/error.hpp"
#include "episcan/experiments.hpp"
#include "episcan/inference.hpp"
#include "episcan/innovations.hpp"
#include "episcan/io.hpp"
#include "episcan/limits.hpp"

namespace fs = std::filesystem;
using namespace episcan;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::vector<double> alphas;
    std::vector<std::size_t> ns;
    std::optional<double> level;
    std::optional<std::size_t> reps;
    std::optional<std::string> cache_dir;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON experiment config");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output path (default: stdout)");
    cmd->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
    cmd->add_option("--alpha", f.alphas, "weight exponent(s) alpha in [0,1)");
    cmd->add_option("--n", f.ns, "sample size(s)");
    cmd->add_option("--level", f.level, "significance level");
}

void add_reps(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--reps", f.reps, "Monte Carlo replicates");
    cmd->add_option("--cache-dir", f.cache_dir, "directory of cached critical-value tables");
}

ExperimentConfig load_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = parse_config(read_json_file(f.config_path));
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out = *f.out;
    if (f.threads) cfg.threads = *f.threads;
    if (!f.alphas.empty()) cfg.alphas = f.alphas;
    if (!f.ns.empty()) cfg.ns = f.ns;
    if (f.level) cfg.level = *f.level;
    if (f.reps) cfg.reps = *f.reps;
    if (f.cache_dir) cfg.calibration.cache_dir = *f.cache_dir;
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return cfg;
}

// Writes to cfg.out, or stdout when empty.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + path);
    write(out);
}

std::string joined_args(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const std::size_t n = cfg.ns.front();
    if (n < 1) throw ConfigError("n must be at least 1");
    double phi = 0.0;
    try {
        phi = resolve_phi(cfg.model, n);
        validate(cfg.epidemic, n);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto eps = sample_innovations(cfg.innovation, n, replicate_stream(cfg.seed, n, 0, StreamRole::Innovations));
    const SeriesBundle bundle = simulate(phi, cfg.epidemic, eps);
    std::ostringstream banner;
    banner << csv_banner("simulate") << " seed=" << cfg.seed << " n=" << n << " phi=" << format_double(phi);
    emit(cfg.out, [&](std::ostream& os) { write_series_csv(os, bundle, banner.str()); });
    return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg, const std::optional<std::string>& sample_csv) {
    if (cfg.calibration.reps == 0) throw ConfigError("calibration reps must be positive");
    if (cfg.calibration.grid_n < 1) throw ConfigError("calibration grid_n must be positive");
    for (double a : cfg.alphas)
        if (!(a >= 0.0 && a < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    CalibrationSettings settings = cfg.calibration;
    settings.cache_dir.clear();
    const CriticalValueTable table = calibrate_table(cfg.alphas, settings);

    Json summary = Json::array();
    for (const auto& e : table.entries()) {
        if (!cfg.out.empty()) {
            fs::path target(cfg.out);
            if (cfg.alphas.size() > 1 || fs::is_directory(target) || target.extension() != ".json")
                target = calibration_cache_path(target, e.key);
            save_calibration(e, target);
        }
        summary.push_back(to_json(e, false));
    }
    if (sample_csv) {
        if (table.entries().size() != 1) throw ConfigError("--sample-csv needs exactly one alpha");
        emit(*sample_csv, [&](std::ostream& os) { write_sample_csv(os, table.entries().front()); });
    }
    std::cout << (summary.size() == 1 ? summary.front() : summary).dump(2) << '\n';
    return 0;
}

struct TestFlags {
    std::string series;
    std::vector<std::string> tables;
    std::optional<std::string> mode;
    std::optional<double> p;
    std::optional<double> b_n;
    std::optional<std::size_t> k_min;
    std::string format = "json";
};

int cmd_test(ExperimentConfig cfg, const TestFlags& t) {
    if (t.mode) {
        if (*t.mode != "light" && *t.mode != "heavy") throw ConfigError("--mode must be light or heavy");
        cfg.heavy_tail = *t.mode == "heavy";
    }
    if (t.p) cfg.p = *t.p;
    if (t.b_n) cfg.b_n = *t.b_n;
    if (t.k_min) cfg.k_min = *t.k_min;
    if (!t.tables.empty()) cfg.tables = t.tables;
    if (t.format != "json" && t.format != "csv") throw ConfigError("--format must be json or csv");
    if (cfg.alphas.empty()) throw ConfigError("at least one alpha is required");

    const TestMode mode = make_mode(cfg);
    for (double a : cfg.alphas) check_mode(a, mode);
    if (cfg.heavy_tail && !cfg.b_n && !cfg.p && std::holds_alternative<Gaussian>(cfg.innovation))
        throw ConfigError("heavy-tail mode needs p and b_n, or a regularly varying innovation spec");

    CriticalValueTable table;
    for (const auto& path : cfg.tables) table.add(load_calibration(path));
    if (!cfg.heavy_tail) {
        if (table.empty()) throw CalibrationRequired("light-tail test needs --table (run `episcan calibrate`)");
        for (double a : cfg.alphas) (void)table.find(a);
    }

    if (t.series.empty()) throw ConfigError("--series is required");
    const SeriesFile file = read_series_csv(t.series);
    const FitResult fit = fit_ar1(file.y);
    const auto profile = ScaleProfile::exact(fit.residuals, cfg.k_min);

    std::vector<TestReport> reports;
    for (double a : cfg.alphas) {
        TestOptions opt;
        opt.alpha = a;
        opt.mode = mode;
        opt.level = cfg.level;
        opt.k_min = cfg.k_min;
        reports.push_back(decide(fit, profile, opt, cfg.heavy_tail ? nullptr : &table));
    }

    emit(cfg.out, [&](std::ostream& os) {
        if (t.format == "csv") {
            os << test_report_csv_header() << '\n';
            for (const auto& r : reports) os << test_report_csv_row(r) << '\n';
            return;
        }
        Json out = Json::array();
        for (const auto& r : reports) out.push_back(to_json(r));
        os << (out.size() == 1 ? out.front() : out).dump(2) << '\n';
    });
    return 0;
}

CriticalValueTable experiment_table(const ExperimentConfig& cfg) {
    if (cfg.heavy_tail) return {};
    CriticalValueTable table;
    for (const auto& path : cfg.tables) table.add(load_calibration(path));
    std::vector<double> missing;
    for (double a : cfg.alphas) {
        try {
            (void)table.find(a);
        } catch (const CalibrationRequired&) {
            missing.push_back(a);
        }
    }
    if (!missing.empty()) {
        const CriticalValueTable computed = calibrate_table(missing, cfg.calibration);
        for (const auto& e : computed.entries()) table.add(e);
    }
    return table;
}

int cmd_size(const ExperimentConfig& cfg, const std::string& banner) {
    validate_test_settings(cfg);
    const CriticalValueTable table = experiment_table(cfg);
    const auto rows = run_size(cfg, &table);
    emit(cfg.out, [&](std::ostream& os) {
        os << banner << '\n';
        write_size_csv(os, rows);
    });
    return 0;
}

int cmd_power(const ExperimentConfig& cfg, const std::string& banner) {
    validate_test_settings(cfg);
    const CriticalValueTable table = experiment_table(cfg);
    const auto rows = run_power(cfg, &table);
    emit(cfg.out, [&](std::ostream& os) {
        os << banner << '\n';
        write_power_csv(os, rows);
    });
    return 0;
}

int cmd_consistency(const ExperimentConfig& cfg, const std::string& banner) {
    validate_test_settings(cfg);
    const CriticalValueTable table = experiment_table(cfg);
    const auto rows = run_consistency(cfg, &table);
    emit(cfg.out, [&](std::ostream& os) {
        os << banner << '\n';
        write_consistency_csv(os, rows);
    });
    return 0;
}

int cmd_verify_bounds(const ExperimentConfig& cfg) {
    const BoundsReport report = verify_bounds();
    emit(cfg.out, [&](std::ostream& os) { write_bounds_report(os, report); });
    return report.passed() ? 0 : 1;
}

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic change detection in AR(1) innovations"};
    app.require_subcommand(1);

    CommonFlags common;
    std::optional<std::string> sample_csv;
    std::optional<std::size_t> grid_n;
    TestFlags test_flags;

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate one AR(1) path and write it as CSV");
    add_common(simulate_cmd, common);

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Monte Carlo critical values of the limit law");
    add_common(calibrate_cmd, common);
    calibrate_cmd->add_option("--grid-n", grid_n, "grid size of the discretised Brownian path");
    calibrate_cmd->add_option("--reps", common.reps, "calibration replicates");
    calibrate_cmd->add_option("--sample-csv", sample_csv, "also write the sorted sample as CSV");

    auto* test_cmd = app.add_subcommand("test", "test one series file");
    add_common(test_cmd, common);
    test_cmd->add_option("--series", test_flags.series, "series CSV (columns index,y[,eps,tau,z])");
    test_cmd->add_option("--table", test_flags.tables, "critical-value table file(s)");
    test_cmd->add_option("--mode", test_flags.mode, "light | heavy");
    test_cmd->add_option("--p", test_flags.p, "declared tail exponent");
    test_cmd->add_option("--b-n", test_flags.b_n, "heavy-tail normaliser b_n");
    test_cmd->add_option("--k-min", test_flags.k_min, "window start convention (0 or 1)");
    test_cmd->add_option("--format", test_flags.format, "json | csv");

    auto* size_cmd = app.add_subcommand("size", "rejection rates under H0");
    add_common(size_cmd, common);
    add_reps(size_cmd, common);
    auto* power_cmd = app.add_subcommand("power", "rejection rates under epidemic alternatives");
    add_common(power_cmd, common);
    add_reps(power_cmd, common);
    auto* consistency_cmd = app.add_subcommand("consistency", "growth of the normalised statistic along n");
    add_common(consistency_cmd, common);
    add_reps(consistency_cmd, common);
    auto* bounds_cmd = app.add_subcommand("verify-bounds", "deterministic drift/indicator bound grid");
    add_common(bounds_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("config_error", e.what());
        return 2;
    }

    try {
        ExperimentConfig cfg = load_config(common);
        const std::string banner = csv_banner(app.get_subcommands().front()->get_name() + " " + joined_args(argc, argv));
        if (simulate_cmd->parsed()) return cmd_simulate(cfg);
        if (calibrate_cmd->parsed()) {
            if (grid_n) cfg.calibration.grid_n = *grid_n;
            if (common.reps) cfg.calibration.reps = *common.reps;
            if (common.seed) cfg.calibration.seed = *common.seed;
            return cmd_calibrate(cfg, sample_csv);
        }
        if (test_cmd->parsed()) return cmd_test(cfg, test_flags);
        if (size_cmd->parsed()) return cmd_size(cfg, banner);
        if (power_cmd->parsed()) return cmd_power(cfg, banner);
        if (consistency_cmd->parsed()) return cmd_consistency(cfg, banner);
        if (bounds_cmd->parsed()) return cmd_verify_bounds(cfg);
    } catch (const Error& e) {
        report_error(e.kind(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        report_error("data_error", e.what());
        return 4;
    }
    return 0;
}
