#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "episcan/config.hpp"
#include "episcan/limits.hpp"

namespace episcan {

/// Light-tail table for every alpha, reusing cached entries and computing the
/// missing ones in a single shared Monte Carlo pass.
CriticalValueTable calibrate_table(std::span<const double> alphas, const CalibrationSettings& settings);

/// Substream of replicate r at sample size n: derive_stream(seed, (n << 32) | r, role).
StreamId replicate_stream(std::uint64_t seed, std::size_t n, std::size_t replicate, StreamRole role);

/// Per-replicate outcome of a Monte Carlo cell, indexed [alpha][replicate].
struct ReplicateOutcomes {
    std::vector<std::vector<double>> normalized;
    std::vector<std::vector<char>> rejected;
    std::vector<double> phi_hat;  ///< by replicate

    double rejection_rate(std::size_t alpha_index) const;
    double median_normalized(std::size_t alpha_index) const;
};

/// Simulates `reps` paths of size n under (model, innovation, epidemic), fits,
/// and scores every alpha from one residual profile per replicate. Parallel
/// over replicates; results are independent of the thread count.
ReplicateOutcomes run_replicates(const ExperimentConfig& cfg, std::size_t n, const EpidemicSpec& epidemic,
                                 const CriticalValueTable* table);

struct SizeRow {
    std::size_t n = 0;
    double alpha = 0.0;
    double level = 0.0;
    double rejection_rate = 0.0;
    std::size_t reps = 0;
    double mc_stderr = 0.0;
};

struct PowerRow {
    std::size_t n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double theta = 0.0;
    double amplitude = 0.0;
    double rejection_rate = 0.0;
    std::size_t ell_star = 0;
    std::size_t reps = 0;
};

struct ConsistencyRow {
    std::size_t n = 0;
    double median_normalized = 0.0;
    double alpha = 0.0;
    std::size_t ell_star = 0;
    double rejection_rate = 0.0;
    double lemma_ratio = 0.0;       ///< a^2 l* / (n (1 - phi_n)); should tend to 0
    double normalized_lower_bound = 0.0;  ///< 1/2 |a| l*^(1-alpha) under the test's normalisation
    std::size_t reps = 0;
};

/// Rejection rates under H0 for every (n, alpha).
std::vector<SizeRow> run_size(const ExperimentConfig& cfg, const CriticalValueTable* table);

/// Epidemic of length ceil(theta n^beta) starting at floor(k_star_fraction n),
/// swept over n x beta x theta x amplitude.
std::vector<PowerRow> run_power(const ExperimentConfig& cfg, const CriticalValueTable* table);

/// Median normalised statistic and rejection rate along n for the first
/// (beta, theta, amplitude) of the config.
std::vector<ConsistencyRow> run_consistency(const ExperimentConfig& cfg, const CriticalValueTable* table);

/// Epidemic window used by power and consistency runs.
EpidemicSpec sweep_epidemic(const ExperimentConfig& cfg, std::size_t n, double beta, double theta, double amplitude);

void write_size_csv(std::ostream& os, std::span<const SizeRow> rows);
void write_power_csv(std::ostream& os, std::span<const PowerRow> rows);
void write_consistency_csv(std::ostream& os, std::span<const ConsistencyRow> rows);

/// Deterministic checks of the drift and indicator bounds over a grid.
struct BoundsGrid {
    std::vector<double> phis{0.5, 0.9, 0.99, 0.999};
    std::vector<double> alphas{0.0, 0.1, 0.25, 0.4};
    std::vector<double> ell_fractions{0.01, 0.1, 0.5};
    std::vector<std::size_t> ns{200, 1000};
    std::vector<double> amplitudes{1.0, -2.5};
};

struct BoundCheck {
    std::string name;
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    double worst = 0.0;  ///< largest ratio of statistic to bound (upper) or bound to statistic (lower), or rel. error
    bool passed() const { return evaluated > 0 && violations == 0; }
};

struct BoundsReport {
    std::size_t configurations = 0;
    std::vector<BoundCheck> checks;
    bool passed() const;
};

BoundsReport verify_bounds(const BoundsGrid& grid = {});
void write_bounds_report(std::ostream& os, const BoundsReport& report);

}  // namespace episcan
