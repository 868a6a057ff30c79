#include "episcan/ar1.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "episcan/error.hpp"

namespace episcan {
namespace {

double gamma_raw(const NearUnit& m, double n) {
    if (m.schedule == NearUnit::Schedule::PowerLaw) return m.c * std::pow(n, m.d);
    return m.c * std::log(n);
}

bool phi_in_unit_interval(const NearUnit& m, std::size_t n) {
    const double ratio = gamma_raw(m, static_cast<double>(n)) / static_cast<double>(n);
    return ratio > 0.0 && ratio < 1.0;
}

}  // namespace

void validate(const ModelSpec& model) {
    if (const auto* f = std::get_if<FixedPhi>(&model)) {
        if (!(f->phi > -1.0 && f->phi < 1.0)) throw DomainError("fixed phi must lie in (-1, 1)");
        return;
    }
    const auto& m = std::get<NearUnit>(model);
    if (!(m.c > 0.0) || !std::isfinite(m.c)) throw DomainError("near-unit schedule: c must be positive");
    if (m.schedule == NearUnit::Schedule::PowerLaw && !(m.d > 0.0 && m.d < 1.0))
        throw DomainError("near-unit power-law schedule: exponent d must lie in (0, 1)");
}

void validate(const EpidemicSpec& e, std::size_t n) {
    if (!std::isfinite(e.amplitude)) throw DomainError("epidemic amplitude must be finite");
    if (e.ell_star < 1) throw DomainError("epidemic duration ell_star must be at least 1");
    if (e.k_star >= n) throw DomainError("epidemic start k_star must be below n");
    if (e.end() > n) throw DomainError("epidemic window k_star + ell_star exceeds n");
}

std::size_t n_min(const ModelSpec& model) {
    validate(model);
    const auto* m = std::get_if<NearUnit>(&model);
    if (m == nullptr) return 1;
    // n - gamma_n is increasing for PowerLaw, and for Logarithmic it is convex
    // with its minimum at n = c, so the condition fails on at most one
    // initial run of integers.
    std::size_t start = 2;
    if (m->schedule == NearUnit::Schedule::PowerLaw && phi_in_unit_interval(*m, 1)) return 1;
    if (m->schedule == NearUnit::Schedule::Logarithmic) {
        const auto below = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(m->c)));
        start = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(m->c)));
        if (phi_in_unit_interval(*m, below) && phi_in_unit_interval(*m, start)) return 2;
    } else if (phi_in_unit_interval(*m, start)) {
        return 2;
    }
    std::size_t lo = start, hi = start;
    while (!phi_in_unit_interval(*m, hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (phi_in_unit_interval(*m, mid) ? hi : lo) = mid;
    }
    return hi;
}

double gamma_n(const ModelSpec& model, std::size_t n) {
    if (const auto* f = std::get_if<FixedPhi>(&model)) return static_cast<double>(n) * (1.0 - f->phi);
    return gamma_raw(std::get<NearUnit>(model), static_cast<double>(n));
}

double resolve_phi(const ModelSpec& model, std::size_t n) {
    validate(model);
    if (n == 0) throw DomainError("resolve_phi: n must be at least 1");
    if (const auto* f = std::get_if<FixedPhi>(&model)) return f->phi;
    const auto& m = std::get<NearUnit>(model);
    if (!phi_in_unit_interval(m, n) || n < n_min(model))
        throw DomainError("resolve_phi: n = " + std::to_string(n) + " is below n_min = " +
                          std::to_string(n_min(model)) + " for this near-unit schedule");
    return 1.0 - gamma_raw(m, static_cast<double>(n)) / static_cast<double>(n);
}

std::vector<double> drift_tau(double phi, const EpidemicSpec& e, std::size_t n) {
    validate(e, n);
    std::vector<double> tau(n + 1, 0.0);
    if (e.is_null()) return tau;
    for (std::size_t k = 1; k <= n; ++k) tau[k] = phi * tau[k - 1] + e.drift_at(k);
    return tau;
}

std::vector<double> drift_tau(const ModelSpec& model, const EpidemicSpec& e, std::size_t n) {
    return drift_tau(resolve_phi(model, n), e, n);
}

double drift_tau_lagged_sum(double phi, const EpidemicSpec& e, std::size_t n) {
    validate(e, n);
    if (!(phi > -1.0 && phi < 1.0)) throw DomainError("drift_tau_lagged_sum: phi must lie in (-1, 1)");
    const double one_minus = 1.0 - phi;
    const double ell = static_cast<double>(e.ell_star);
    const double decay = std::pow(phi, static_cast<double>(n - e.end()));
    return e.amplitude / one_minus * (ell - decay * (1.0 - std::pow(phi, ell)) / one_minus);
}

void simulate_path_into(double phi, const EpidemicSpec& e, std::span<const double> eps, std::span<double> y) {
    const std::size_t n = eps.size();
    if (y.size() != n + 1) throw DomainError("simulate: output buffer must have length n + 1");
    y[0] = 0.0;
    if (e.is_null()) {
        for (std::size_t k = 1; k <= n; ++k) y[k] = phi * y[k - 1] + eps[k - 1];
        return;
    }
    for (std::size_t k = 1; k <= n; ++k) y[k] = phi * y[k - 1] + eps[k - 1] + e.drift_at(k);
}

SeriesBundle simulate(double phi, const EpidemicSpec& e, std::span<const double> eps) {
    const std::size_t n = eps.size();
    if (n == 0) throw DomainError("simulate: need at least one innovation");
    if (!(phi > -1.0 && phi < 1.0)) throw DomainError("simulate: phi must lie in (-1, 1)");
    validate(e, n);
    SeriesBundle b;
    b.phi = phi;
    b.epidemic = e;
    b.eps.assign(eps.begin(), eps.end());
    b.y.resize(n + 1);
    simulate_path_into(phi, e, eps, b.y);
    b.tau = drift_tau(phi, e, n);
    // z = y - tau, an H0 path driven by the same innovations.
    b.z.resize(n + 1);
    b.z[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) b.z[k] = e.is_null() ? b.y[k] : b.y[k] - b.tau[k];
    return b;
}

SeriesBundle simulate(const ModelSpec& model, const EpidemicSpec& e, std::span<const double> eps) {
    if (eps.empty()) throw DomainError("simulate: need at least one innovation");
    return simulate(resolve_phi(model, eps.size()), e, eps);
}

}  // namespace episcan
