#pragma once

/**
 * @file numerics.hpp
 * @brief Special functions and quadrature used throughout the library.
 *
 * - log_factorial: exact table up to 20!, log-Gamma above.
 * - bessel_k / log_bessel_k: real-order K_nu(x) from the integral
 *   representation K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
 *   evaluated by a refined trapezoidal sum. The integrand is even and
 *   analytic in t, so the trapezoidal rule converges geometrically.
 * - kv_moment_closed_form: int_0^inf K_nu(t) t^(mu-1) dt in Gamma form.
 * - integrate_semi_infinite: double-exponential quadrature on (0, inf),
 *   split at t = 1.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mpt::numerics {

/// Raised when an iterative numerical method exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

// ---------------------------------------------------------------------------
// log n!
// ---------------------------------------------------------------------------

namespace detail {

// n! for n <= 20 is exactly representable in a double (20! = 2^18 * odd < 2^53 * 2^18).
inline constexpr std::array<std::uint64_t, 21> kFactorials = [] {
  std::array<std::uint64_t, 21> table{};
  table[0] = 1;
  for (std::size_t i = 1; i < table.size(); ++i) table[i] = table[i - 1] * i;
  return table;
}();

}  // namespace detail

/// ln(n!). Exact-table lookup for n <= 20, log-Gamma above.
template <std::floating_point Real = double>
Real log_factorial(std::uint64_t n) {
  if (n < detail::kFactorials.size()) {
    return std::log(static_cast<Real>(detail::kFactorials[n]));
  }
  return std::lgamma(static_cast<Real>(n) + Real{1});
}

// ---------------------------------------------------------------------------
// Modified Bessel function of the second kind, real order
// ---------------------------------------------------------------------------

namespace detail {

// log(cosh(y)) for y >= 0 without overflow.
inline double log_cosh(double y) {
  return y + std::log1p(std::exp(-2.0 * y)) - std::numbers::ln2;
}

}  // namespace detail

/**
 * ln K_nu(x) for x > 0 and any finite real nu.
 *
 * The integrand exp(-x cosh t) cosh(nu t) is scaled by its value at the
 * saddle t* = asinh(|nu|/x) so that neither large orders nor small
 * arguments overflow. The sum is truncated once the scaled log-integrand
 * drops below -745 (the double underflow threshold). Accuracy is better
 * than 1e-12 relative for |nu| <= 100 and x in [1e-6, 700].
 */
inline double log_bessel_k(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel_k: argument must be positive and finite, got " +
                            std::to_string(x));
  }
  if (!std::isfinite(nu)) throw std::domain_error("bessel_k: order must be finite");
  nu = std::fabs(nu);

  // exp(-x) is factored out: cosh t - 1 = 2 sinh^2(t/2) keeps the exponent
  // accurate when x is large.
  auto log_integrand = [nu, x](double t) {
    const double half = std::sinh(0.5 * t);
    return -2.0 * x * half * half + detail::log_cosh(nu * t);
  };

  const double t_peak = std::asinh(nu / x);
  const double log_peak = log_integrand(t_peak);
  constexpr double kUnderflow = -745.0;

  // Walk past the peak until the integrand is negligible. Past the peak the
  // decay is doubly exponential, so this terminates after a few steps.
  double t_end = t_peak;
  double stride = 0.25;
  while (log_integrand(t_end) - log_peak > kUnderflow) {
    t_end += stride;
    stride *= 1.5;
  }

  auto scaled = [&](double t) { return std::exp(log_integrand(t) - log_peak); };

  // Trapezoidal rule with successive halving; only odd nodes are new at each level.
  int panels = 16;
  double step = t_end / panels;
  double sum = 0.5 * (scaled(0.0) + scaled(t_end));
  for (int i = 1; i < panels; ++i) sum += scaled(i * step);
  double estimate = sum * step;

  constexpr int kMaxLevels = 20;
  for (int level = 0; level < kMaxLevels; ++level) {
    double fresh = 0.0;
    for (int i = 0; i < panels; ++i) fresh += scaled((2 * i + 1) * 0.5 * step);
    sum += fresh;
    panels *= 2;
    step *= 0.5;
    const double refined = sum * step;
    const double change = std::fabs(refined - estimate);
    estimate = refined;
    // The error roughly squares with each halving once the peak is resolved,
    // so a change of 1e-13 leaves the refined value accurate to rounding.
    if (level >= 2 && change <= 1e-13 * estimate) {
      return -x + log_peak + std::log(estimate);
    }
  }
  throw ConvergenceError("bessel_k: trapezoidal refinement did not converge (nu=" +
                         std::to_string(nu) + ", x=" + std::to_string(x) + ")");
}

/// K_nu(x). Underflows to 0 for very large x and overflows to +inf for
/// extreme nu/x ratios; use log_bessel_k in those regimes.
inline double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

// ---------------------------------------------------------------------------
// Mellin moment of K_nu
// ---------------------------------------------------------------------------

/// ln of int_0^inf K_nu(t) t^(mu-1) dt = 2^(mu-2) Gamma((mu-nu)/2) Gamma((mu+nu)/2).
inline double log_kv_moment_closed_form(double mu, double nu) {
  if (!(mu > std::fabs(nu))) {
    throw std::domain_error("kv_moment_closed_form: requires mu > |nu| (mu=" + std::to_string(mu) +
                            ", nu=" + std::to_string(nu) + ")");
  }
  return (mu - 2.0) * std::numbers::ln2 + std::lgamma(0.5 * (mu - nu)) +
         std::lgamma(0.5 * (mu + nu));
}

inline double kv_moment_closed_form(double mu, double nu) {
  return std::exp(log_kv_moment_closed_form(mu, nu));
}

// ---------------------------------------------------------------------------
// Semi-infinite quadrature
// ---------------------------------------------------------------------------

struct QuadratureOptions {
  /// Finest refinement level; the step is 2^-max_level in the transformed variable.
  int max_level = 12;
  /// Levels always computed before convergence is tested.
  int min_level = 3;
};

namespace detail {

// Trapezoidal sum of term(x) over x in R, refined by halving the step.
// term(x) already contains the Jacobian of the variable change and must
// return 0 where the transformed weight underflows. Returns the final
// estimate with |I_k - I_{k-1}| as the error estimate.
template <class Term>
QuadratureResult refine_trapezoid(Term&& term, double tol, const QuadratureOptions& options) {
  QuadratureResult result;

  // Extent: walk outward on a coarse grid until the terms stay negligible.
  constexpr double kCoarse = 0.125;
  constexpr double kXLimit = 8.0;
  double peak = std::fabs(term(0.0));
  ++result.evaluations;
  auto extent = [&](double direction) {
    double x = 0.0;
    int quiet = 0;
    while (std::fabs(x) < kXLimit) {
      x += direction * kCoarse;
      const double value = std::fabs(term(x));
      ++result.evaluations;
      peak = std::max(peak, value);
      quiet = (value <= 1e-20 * peak) ? quiet + 1 : 0;
      if (quiet >= 4) break;
    }
    return x;
  };
  const double x_hi = extent(+1.0);
  const double x_lo = extent(-1.0);

  auto sum_nodes = [&](double first, double stride) {
    double sum = 0.0;
    for (long k = 0; first + k * stride <= x_hi; ++k) {
      sum += term(first + k * stride);
      ++result.evaluations;
    }
    for (long k = 1; first - k * stride >= x_lo; ++k) {
      sum += term(first - k * stride);
      ++result.evaluations;
    }
    return sum;
  };

  double step = 0.5;
  double sum = sum_nodes(0.0, step);
  double estimate = sum * step;
  for (int level = 1; level <= options.max_level; ++level) {
    // New nodes at odd multiples of step/2.
    sum += sum_nodes(0.5 * step, step);
    step *= 0.5;
    const double refined = sum * step;
    result.abs_error_estimate = std::fabs(refined - estimate);
    estimate = refined;
    result.value = estimate;
    if (!std::isfinite(estimate)) {
      throw std::domain_error("integrate_semi_infinite: integrand produced a non-finite value");
    }
    if (level >= options.min_level &&
        result.abs_error_estimate <= tol * std::max(1.0, std::fabs(estimate))) {
      return result;
    }
  }
  throw ConvergenceError("integrate_semi_infinite: no convergence after " +
                         std::to_string(result.evaluations) + " evaluations (estimate " +
                         std::to_string(estimate) + ", error " +
                         std::to_string(result.abs_error_estimate) + ")");
}

}  // namespace detail

/**
 * int_0^inf f(t) dt for f with at most an integrable power singularity at 0
 * and exponential decay at infinity.
 *
 * (0, 1] uses the tanh-sinh map t = 1 / (1 + exp(-pi sinh x)), which
 * clusters nodes at both endpoints and absorbs t^p singularities (p > -1).
 * [1, inf) substitutes t = e^u and then u = exp(pi/2 sinh x).
 * Each half is refined independently until its error estimate satisfies
 * err <= tol * max(1, |value|); the budget is QuadratureOptions::max_level
 * halvings (a few times 10^4 evaluations per half by default).
 *
 * @throws ConvergenceError when the budget is exhausted.
 */
template <std::invocable<double> F>
QuadratureResult integrate_semi_infinite(F&& f, double tol, QuadratureOptions options = {}) {
  if (!(tol > 0.0)) throw std::domain_error("integrate_semi_infinite: tol must be positive");
  constexpr double kPi = std::numbers::pi;

  auto head = [&](double x) -> double {
    const double sh = kPi * std::sinh(x);
    const double small = std::exp(-std::fabs(sh));  // distance-to-endpoint factor
    if (small == 0.0) return 0.0;
    const double t = x < 0.0 ? small / (1.0 + small) : 1.0 / (1.0 + small);
    if (t <= 0.0) return 0.0;
    const double weight = kPi * std::cosh(x) * small / ((1.0 + small) * (1.0 + small));
    if (weight == 0.0) return 0.0;
    return weight * static_cast<double>(f(t));
  };

  auto tail = [&](double x) -> double {
    const double u = std::exp(0.5 * kPi * std::sinh(x));
    if (u == 0.0 || u > 700.0) return 0.0;
    const double t = std::exp(u);
    const double weight = t * u * 0.5 * kPi * std::cosh(x);
    const double value = static_cast<double>(f(t));
    if (value == 0.0) return 0.0;
    return weight * value;
  };

  // Each half gets tol/2 so the combined estimate meets tol * max(1, |value|)
  // for integrands of one sign.
  const QuadratureResult lower = detail::refine_trapezoid(head, 0.5 * tol, options);
  const QuadratureResult upper = detail::refine_trapezoid(tail, 0.5 * tol, options);
  return QuadratureResult{lower.value + upper.value,
                          lower.abs_error_estimate + upper.abs_error_estimate,
                          lower.evaluations + upper.evaluations};
}

}  // namespace mpt::numerics
