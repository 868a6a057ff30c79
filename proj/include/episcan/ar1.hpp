#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace episcan {

/// phi fixed in (-1, 1).
struct FixedPhi {
    double phi = 0.5;
};

/// phi_n = 1 - gamma_n / n with gamma_n = c n^d (PowerLaw) or c ln n (Logarithmic).
struct NearUnit {
    enum class Schedule { PowerLaw, Logarithmic };
    Schedule schedule = Schedule::PowerLaw;
    double c = 1.0;
    double d = 0.5;  ///< exponent, PowerLaw only
};

using ModelSpec = std::variant<FixedPhi, NearUnit>;

/// Epidemic alternative: innovations are shifted by `amplitude` on the
/// 1-based indices k_star+1 .. k_star+ell_star. amplitude == 0 encodes H0.
struct EpidemicSpec {
    std::size_t k_star = 0;
    std::size_t ell_star = 1;
    double amplitude = 0.0;

    bool is_null() const { return amplitude == 0.0; }
    std::size_t end() const { return k_star + ell_star; }  ///< m* = k* + l*
    /// Drift a_{n,k} at 1-based index k.
    double drift_at(std::size_t k) const {
        return (k > k_star && k <= end()) ? amplitude : 0.0;
    }
};

/// Simulated path. y, tau and z are indexed 0..n with y[0] = tau[0] = z[0] = 0;
/// eps holds the n innovations e_1..e_n at positions 0..n-1.
struct SeriesBundle {
    double phi = 0.0;
    EpidemicSpec epidemic;
    std::vector<double> y;
    std::vector<double> eps;
    std::vector<double> tau;
    std::vector<double> z;

    std::size_t n() const { return y.empty() ? 0 : y.size() - 1; }
};

void validate(const ModelSpec& model);
void validate(const EpidemicSpec& epidemic, std::size_t n);

/// gamma_n = n (1 - phi_n); for FixedPhi this is n (1 - phi).
double gamma_n(const ModelSpec& model, std::size_t n);

/// Smallest n for which phi_n stays in (0, 1) from there on. 1 for FixedPhi.
std::size_t n_min(const ModelSpec& model);

/// phi for sample size n. Throws DomainError below n_min.
double resolve_phi(const ModelSpec& model, std::size_t n);

/// tau_k = phi tau_{k-1} + a_k, tau_0 = 0; length n+1.
std::vector<double> drift_tau(double phi, const EpidemicSpec& epidemic, std::size_t n);
std::vector<double> drift_tau(const ModelSpec& model, const EpidemicSpec& epidemic, std::size_t n);

/// Closed form of sum_{k=1}^n tau_{k-1} for a single epidemic window.
double drift_tau_lagged_sum(double phi, const EpidemicSpec& epidemic, std::size_t n);

/// y_k = phi y_{k-1} + e_k + a_k with y_0 = 0, plus tau and z = y - tau.
SeriesBundle simulate(double phi, const EpidemicSpec& epidemic, std::span<const double> innovations);
SeriesBundle simulate(const ModelSpec& model, const EpidemicSpec& epidemic, std::span<const double> innovations);

/// Only the observed path y (length n+1); no allocation of tau/z.
void simulate_path_into(double phi, const EpidemicSpec& epidemic, std::span<const double> innovations,
                        std::span<double> y);

}  // namespace episcan
