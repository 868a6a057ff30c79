#include "episcan/innovations.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "episcan/error.hpp"

namespace episcan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Solves t^-p / (1 + ln t) = u for t >= 1, u in (0, 1]. In s = ln t the
// equation is g(s) = p s + ln(1+s) + ln u = 0 with g concave and increasing,
// so Newton from s = 0 approaches the root monotonically from the left.
double log_damped_pareto_inverse(double p, double u) {
    const double log_u = std::log(u);
    double s = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double g = p * s + std::log1p(s) + log_u;
        const double step = g / (p + 1.0 / (1.0 + s));
        s -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + s)) break;
    }
    return std::exp(s);
}

double pareto_mean_shift(const SymmetricPareto& d) {
    if (d.a == 0.5) return 0.0;
    return (2.0 * d.a - 1.0) * d.p / (d.p - 1.0);
}

}  // namespace

void validate(const InnovationSpec& spec) {
    std::visit(overloaded{
                   [](const Gaussian& d) {
                       if (!(d.sigma > 0.0) || !std::isfinite(d.sigma))
                           throw DomainError("gaussian: sigma must be positive");
                   },
                   [](const SymmetricPareto& d) {
                       if (!(d.p > 0.0) || !std::isfinite(d.p))
                           throw DomainError("symmetric_pareto: p must be positive");
                       if (!(d.a > 0.0 && d.a < 1.0))
                           throw DomainError("symmetric_pareto: tail asymmetry a must lie in (0,1)");
                       if (d.a != 0.5 && d.p <= 1.0)
                           throw DomainError("symmetric_pareto: centring an asymmetric law requires p > 1");
                   },
                   [](const StudentT& d) {
                       if (!(d.nu > 2.0) || !std::isfinite(d.nu))
                           throw DomainError("student_t: degrees of freedom must exceed 2");
                   },
                   [](const TruncatedPolyTail& d) {
                       if (!(d.p > 2.0) || !std::isfinite(d.p))
                           throw DomainError("truncated_poly_tail: p must exceed 2");
                   },
               },
               spec);
}

std::string kind_name(const InnovationSpec& spec) {
    return std::visit(overloaded{
                          [](const Gaussian&) { return std::string("gaussian"); },
                          [](const SymmetricPareto&) { return std::string("symmetric_pareto"); },
                          [](const StudentT&) { return std::string("student_t"); },
                          [](const TruncatedPolyTail&) { return std::string("truncated_poly_tail"); },
                      },
                      spec);
}

double tail_index(const InnovationSpec& spec) {
    return std::visit(overloaded{
                          [](const Gaussian&) { return kInf; },
                          [](const SymmetricPareto& d) { return d.p; },
                          [](const StudentT& d) { return d.nu; },
                          [](const TruncatedPolyTail& d) { return d.p; },
                      },
                      spec);
}

TailClass tail_class(const InnovationSpec& spec) {
    return std::visit(overloaded{
                          [](const Gaussian&) { return TailClass::AllMoments; },
                          [](const SymmetricPareto&) { return TailClass::RegularlyVarying; },
                          [](const StudentT&) { return TailClass::RegularlyVarying; },
                          [](const TruncatedPolyTail&) { return TailClass::LittleOWeakLp; },
                      },
                      spec);
}

double variance(const InnovationSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const Gaussian& d) { return d.sigma * d.sigma; },
                          [](const SymmetricPareto& d) {
                              if (d.p <= 2.0) return kInf;
                              const double m = pareto_mean_shift(d);
                              return d.p / (d.p - 2.0) - m * m;
                          },
                          [](const StudentT& d) { return d.nu / (d.nu - 2.0); },
                          [](const TruncatedPolyTail& d) {
                              // E e^2 = 1 + int_0^inf 2 e^{(2-p)s} / (1+s) ds  (t = e^s)
                              boost::math::quadrature::exp_sinh<double> integrator;
                              const double p = d.p;
                              const double tail = integrator.integrate(
                                  [p](double s) { return 2.0 * std::exp((2.0 - p) * s) / (1.0 + s); });
                              return 1.0 + tail;
                          },
                      },
                      spec);
}

void sample_innovations_into(const InnovationSpec& spec, std::span<double> out, StreamId stream) {
    validate(spec);
    Stream rng(stream);
    std::visit(overloaded{
                   [&](const Gaussian& d) {
                       for (double& v : out) v = d.sigma * rng.normal();
                   },
                   [&](const SymmetricPareto& d) {
                       const double shift = pareto_mean_shift(d);
                       const double inv_p = -1.0 / d.p;
                       for (double& v : out) {
                           const double magnitude = std::pow(rng.uniform_open(), inv_p);
                           const bool positive = rng.bernoulli(d.a);
                           v = (positive ? magnitude : -magnitude) - shift;
                       }
                   },
                   [&](const StudentT& d) {
                       // Bailey's polar method.
                       for (double& v : out) {
                           double u = 0.0, w = 0.0;
                           do {
                               u = rng.uniform_signed();
                               const double t = rng.uniform_signed();
                               w = u * u + t * t;
                           } while (w >= 1.0 || w == 0.0);
                           v = u * std::sqrt(d.nu * (std::pow(w, -2.0 / d.nu) - 1.0) / w);
                       }
                   },
                   [&](const TruncatedPolyTail& d) {
                       for (double& v : out) {
                           const double magnitude = log_damped_pareto_inverse(d.p, rng.uniform_open());
                           v = rng.bernoulli(0.5) ? magnitude : -magnitude;
                       }
                   },
               },
               spec);
}

std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n, StreamId stream) {
    if (n == 0) throw DomainError("sample_innovations: n must be at least 1");
    std::vector<double> out(n);
    sample_innovations_into(spec, out, stream);
    return out;
}

double quantile_b_n(const InnovationSpec& spec, std::size_t n) {
    validate(spec);
    if (n == 0) throw DomainError("quantile_b_n: n must be at least 1");
    const double tail = 1.0 / static_cast<double>(n);
    return std::visit(overloaded{
                          [&](const Gaussian& d) {
                              if (n == 1) return 0.0;
                              boost::math::normal_distribution<double> z;
                              return d.sigma * boost::math::quantile(boost::math::complement(z, 0.5 * tail));
                          },
                          [&](const SymmetricPareto& d) { return std::pow(static_cast<double>(n), 1.0 / d.p); },
                          [&](const StudentT& d) {
                              if (n == 1) return 0.0;
                              boost::math::students_t_distribution<double> t(d.nu);
                              return boost::math::quantile(boost::math::complement(t, 0.5 * tail));
                          },
                          [&](const TruncatedPolyTail& d) { return log_damped_pareto_inverse(d.p, tail); },
                      },
                      spec);
}

double alpha_p(double p) {
    if (std::isnan(p) || p < 2.0) throw DomainError("alpha_p: p must be at least 2");
    return 0.5 - 1.0 / p;
}

}  // namespace episcan
