#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "episcan/ar1.hpp"
#include "episcan/inference.hpp"
#include "episcan/innovations.hpp"
#include "episcan/io.hpp"

namespace episcan {

/// Where light-tail critical values come from.
struct CalibrationSettings {
    std::size_t grid_n = 2048;
    std::size_t reps = 10000;
    std::uint64_t seed = 20140301;
    std::filesystem::path cache_dir;  ///< empty: compute in memory only
};

/// Parameters shared by all subcommands. Fields irrelevant to a command are
/// ignored by it.
///
/// JSON layout (every key optional):
/// {
///   "model": {"regime": "fixed", "phi": 0.5}
///          | {"regime": "near_unit", "schedule": "power_law"|"logarithmic", "c": 1, "d": 0.5},
///   "innovation": {"kind": "gaussian", "params": {"sigma": 1}},
///   "epidemic": {"k_star": 0, "ell_star": 1, "amplitude": 0},
///   "alpha": 0.25 | [0, 0.25],  "n": 2000 | [500, 1000],
///   "reps": 500, "level": 0.05, "seed": 1, "out": "path", "threads": 0,
///   "mode": "light" | "heavy", "p": 2, "b_n": 10, "k_min": 0,
///   "calibration": {"grid_n": 2048, "reps": 10000, "seed": 20140301, "cache_dir": "cv"},
///   "table": "path" | ["path", ...],
///   "beta": [0.4], "theta": [1], "amplitude": [1], "k_star_fraction": 0.5
/// }
struct ExperimentConfig {
    ModelSpec model = FixedPhi{0.5};
    InnovationSpec innovation = Gaussian{1.0};
    EpidemicSpec epidemic;
    std::vector<double> alphas{0.0};
    std::vector<std::size_t> ns{500, 1000, 2000, 5000, 10000};
    std::size_t reps = 500;
    double level = 0.05;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;
    bool heavy_tail = false;
    std::optional<double> p;
    std::optional<double> b_n;
    std::size_t k_min = 0;
    CalibrationSettings calibration;
    std::vector<std::string> tables;
    std::vector<double> betas{0.4};
    std::vector<double> thetas{1.0};
    std::vector<double> amplitudes{1.0};
    double k_star_fraction = 0.5;
};

/// Throws ConfigError on unknown keys or ill-typed values.
ExperimentConfig parse_config(const Json& j);

/// Declared tail exponent: explicit p, else the innovation's tail index.
double declared_p(const ExperimentConfig& cfg);

/// Test mode for the configured tail regime.
TestMode make_mode(const ExperimentConfig& cfg);

/// Cross-field checks before any computation: alpha against alpha_p for the
/// chosen mode, positivity of counts, level in (0, 1).
void validate_test_settings(const ExperimentConfig& cfg);

}  // namespace episcan
