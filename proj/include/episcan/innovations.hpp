#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "episcan/rng.hpp"

namespace episcan {

/// N(0, sigma^2). Belongs to every L_q.
struct Gaussian {
    double sigma = 1.0;
};

/// Symmetric-Pareto-type regularly varying law: |e| ~ Pareto(p) on [1, inf),
/// sign +1 with probability a, -1 otherwise, shifted by the analytic mean
/// (2a-1) p/(p-1) when a != 1/2.
struct SymmetricPareto {
    double p = 3.0;
    double a = 0.5;
};

/// Student t with `nu` degrees of freedom; regularly varying with index nu.
struct StudentT {
    double nu = 3.0;
};

/// Symmetric law with P(|e| > t) = t^-p / (1 + ln t) for t >= 1. The
/// logarithmic factor puts it in the little-o weak-L_p class (t^p P(|e|>t)
/// -> 0) while E|e|^p = inf, i.e. just inside the boundary of the light-tail
/// regime.
struct TruncatedPolyTail {
    double p = 4.0;
};

using InnovationSpec = std::variant<Gaussian, SymmetricPareto, StudentT, TruncatedPolyTail>;

enum class TailClass {
    AllMoments,      ///< in L_q for every q (Gaussian)
    LittleOWeakLp,   ///< t^p P(|e|>t) -> 0
    RegularlyVarying ///< t^p P(|e|>t) -> const > 0
};

/// Throws DomainError when the parameters are outside their domain.
void validate(const InnovationSpec& spec);

std::string kind_name(const InnovationSpec& spec);

/// Tail exponent p of the declared class; +inf for Gaussian.
double tail_index(const InnovationSpec& spec);

TailClass tail_class(const InnovationSpec& spec);

/// E e^2, +inf when it does not exist.
double variance(const InnovationSpec& spec);

/// n i.i.d. centred draws; deterministic in (spec, n, stream).
std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n, StreamId stream);

/// In-place variant reusing the caller's buffer.
void sample_innovations_into(const InnovationSpec& spec, std::span<double> out, StreamId stream);

/// The (1 - 1/n)-quantile of |e|, i.e. inf{x > 0 : P(|e| <= x) >= 1 - 1/n}.
/// For n == 1 this is the essential infimum of |e| (0 for Gaussian and
/// Student t, 1 for the Pareto-type laws). For SymmetricPareto the
/// quantile is that of the uncentred magnitude, n^(1/p).
double quantile_b_n(const InnovationSpec& spec, std::size_t n);

/// Critical Hoelder exponent 1/2 - 1/p, p >= 2. p = +inf gives 1/2.
double alpha_p(double p);

}  // namespace episcan
