#include "episcan/limits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "episcan/error.hpp"
#include "episcan/innovations.hpp"
#include "episcan/rng.hpp"
#include "episcan/scan.hpp"

namespace episcan {

bool CalibrationKey::matches(const CalibrationKey& o) const {
    return std::abs(alpha - o.alpha) <= 1e-12 && grid_n == o.grid_n && reps == o.reps &&
           master_seed == o.master_seed;
}

double CalibrationEntry::quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
    if (sample.empty()) throw CalibrationRequired("calibration sample is empty");
    const double m = static_cast<double>(sample.size());
    // The 1e-9 guard keeps e.g. 0.95 * 10000 from rounding up to 9501.
    auto rank = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sample.size());
    return sample[rank - 1];
}

double CalibrationEntry::exceedance(double x) const {
    if (sample.empty()) throw CalibrationRequired("calibration sample is empty");
    const auto first = std::lower_bound(sample.begin(), sample.end(), x);
    return static_cast<double>(sample.end() - first) / static_cast<double>(sample.size());
}

std::string CalibrationEntry::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : sample) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits & 0xffU);
            h *= 0x100000001b3ULL;
            bits >>= 8;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void CriticalValueTable::add(CalibrationEntry entry) {
    for (auto& e : entries_) {
        if (std::abs(e.key.alpha - entry.key.alpha) <= 1e-12) {
            e = std::move(entry);
            return;
        }
    }
    entries_.push_back(std::move(entry));
}

const CalibrationEntry& CriticalValueTable::find(double alpha) const {
    for (const auto& e : entries_)
        if (std::abs(e.key.alpha - alpha) <= 1e-12) return e;
    char buf[96];
    std::snprintf(buf, sizeof buf, "no calibration entry for alpha = %.17g", alpha);
    throw CalibrationRequired(buf);
}

const CalibrationEntry* CriticalValueTable::find_exact(const CalibrationKey& key) const {
    for (const auto& e : entries_)
        if (e.key.matches(key)) return &e;
    return nullptr;
}

std::vector<std::vector<double>> simulate_limit_law(std::span<const double> alphas, std::size_t grid_n,
                                                    std::size_t reps, std::uint64_t master_seed) {
    if (reps == 0) throw DomainError("simulate_limit_law: reps must be positive");
    if (grid_n == 0) throw DomainError("simulate_limit_law: grid_n must be positive");
    for (double a : alphas)
        if (!(a >= 0.0 && a < 1.0)) throw DomainError("simulate_limit_law: alpha must lie in [0, 1)");

    const std::size_t m = alphas.size();
    // Row-major by replicate so that threads write disjoint slots.
    std::vector<double> values(reps * m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid_n));
    const auto count = static_cast<std::ptrdiff_t>(reps);

#pragma omp parallel
    {
        std::vector<double> g(grid_n);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            const auto rep = static_cast<std::size_t>(r);
            sample_innovations_into(Gaussian{1.0}, g, derive_stream(master_seed, rep, StreamRole::Calibration));
            const auto profile = ScaleProfile::exact(g, 0, Execution::Vectorized);
            for (std::size_t i = 0; i < m; ++i) {
                const double weight = std::pow(static_cast<double>(grid_n), alphas[i]) * scale;
                values[rep * m + i] = weight * profile.evaluate(alphas[i]).value;
            }
        }
    }

    std::vector<std::vector<double>> out(m, std::vector<double>(reps));
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t i = 0; i < m; ++i) out[i][r] = values[r * m + i];
    for (auto& s : out) std::sort(s.begin(), s.end());
    return out;
}

std::vector<double> simulate_limit_law(double alpha, std::size_t grid_n, std::size_t reps,
                                       std::uint64_t master_seed) {
    const double alphas[] = {alpha};
    return std::move(simulate_limit_law(alphas, grid_n, reps, master_seed).front());
}

CalibrationEntry calibrate(double alpha, std::size_t grid_n, std::size_t reps, std::uint64_t master_seed) {
    CalibrationEntry e;
    e.key = CalibrationKey{alpha, grid_n, reps, master_seed};
    e.sample = simulate_limit_law(alpha, grid_n, reps, master_seed);
    return e;
}

double critical_value(const CriticalValueTable& table, double alpha, double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("significance level must lie in (0, 1)");
    return table.find(alpha).quantile(1.0 - level);
}

double frechet_cdf(double p, double x) {
    if (!(p > 0.0)) throw DomainError("frechet_cdf: p must be positive");
    if (x <= 0.0) return 0.0;
    return std::exp(-std::pow(x, -p));
}

double frechet_quantile(double p, double q) {
    if (!(p > 0.0)) throw DomainError("frechet_quantile: p must be positive");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("frechet_quantile: q must lie in (0, 1)");
    return std::pow(-std::log(q), -1.0 / p);
}

}  // namespace episcan
