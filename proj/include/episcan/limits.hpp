#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace episcan {

/// Parameters that fully determine a calibration sample.
struct CalibrationKey {
    double alpha = 0.0;
    std::size_t grid_n = 2048;
    std::size_t reps = 10000;
    std::uint64_t master_seed = 0;

    bool matches(const CalibrationKey& other) const;
};

/// Monte Carlo sample of the limit law T_{alpha,inf}(W), sorted ascending.
struct CalibrationEntry {
    static constexpr int kFormatVersion = 1;
    static constexpr double kSummaryLevels[4] = {0.8, 0.9, 0.95, 0.99};

    CalibrationKey key;
    std::vector<double> sample;

    /// ceil(q * reps)-th order statistic (1-based), q in (0, 1]. q -> 1
    /// gives the maximum, q = 0.5 the median.
    double quantile(double q) const;

    /// Fraction of calibration draws >= x.
    double exceedance(double x) const;

    /// FNV-1a over the IEEE-754 bit patterns of the sorted sample, hex.
    std::string digest() const;
};

/// In-memory set of calibration entries, looked up by alpha.
class CriticalValueTable {
public:
    void add(CalibrationEntry entry);
    bool empty() const { return entries_.empty(); }
    std::span<const CalibrationEntry> entries() const { return entries_; }

    /// Entry for this alpha (any grid/reps/seed). Throws CalibrationRequired.
    const CalibrationEntry& find(double alpha) const;
    const CalibrationEntry* find_exact(const CalibrationKey& key) const;

private:
    std::vector<CalibrationEntry> entries_;
};

/// Sorted sample of n^{-1/2} T_{alpha,n}(g_1..g_n), g i.i.d. N(0,1), n = grid_n:
/// the discretised law of max_h h^-alpha max_t |W_{t+h} - W_t - h W_1|.
/// Replicate r draws from derive_stream(master_seed, r, Calibration).
std::vector<double> simulate_limit_law(double alpha, std::size_t grid_n, std::size_t reps,
                                       std::uint64_t master_seed);

/// Several alphas scored on the same Gaussian draws; one kernel pass per
/// replicate. Result[i] is the sorted sample for alphas[i].
std::vector<std::vector<double>> simulate_limit_law(std::span<const double> alphas, std::size_t grid_n,
                                                    std::size_t reps, std::uint64_t master_seed);

CalibrationEntry calibrate(double alpha, std::size_t grid_n, std::size_t reps, std::uint64_t master_seed);

/// Rejection threshold at significance `level`: the (1 - level) quantile of
/// the entry for alpha.
double critical_value(const CriticalValueTable& table, double alpha, double level);

/// P(T_p <= x) = exp(-x^-p).
double frechet_cdf(double p, double x);

/// Inverse of frechet_cdf: (-ln q)^(-1/p).
double frechet_quantile(double p, double q);

}  // namespace episcan
