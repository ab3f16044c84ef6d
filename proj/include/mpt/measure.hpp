#pragma once

/**
 * @file measure.hpp
 * @brief The coherent-state measure m_f(|alpha|) and an auditor for the
 *        resolution of identity it is meant to provide.
 *
 * m_f(r) = K_nu(r) / (2^l pi r^nu C_f^2(r)), nu = (1+gamma) n - eta,
 * l = (1-gamma) n + eta + 1.
 *
 * Both exponents carry the level index n, so the weight differs from level
 * to level. Integrating |<n|alpha,f>|^2 m_f over the plane gives, for
 * level n,
 *   int_0^inf 2 pi r K_nu(r) r^(2n) / (2^l pi r^nu n! (f(n)!)^2) dr
 *     = Gamma(1 + eta - gamma n) / (f(n)!)^2,
 * which equals 1 only as N -> inf. The auditor evaluates this moment by
 * quadrature and by the Gamma-function identity and reports the ratio to
 * the target 1 rather than assuming it.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpt/numerics.hpp"
#include "mpt/spectrum.hpp"
#include "mpt/states.hpp"

namespace mpt {

/// Bessel order nu_n = (1 + gamma) n - eta.
inline double measure_order(const TrapParams& params, std::size_t n) {
  return (1.0 + params.gamma()) * static_cast<double>(n) - params.eta();
}

/// Power-of-two exponent l_n = (1 - gamma) n + eta + 1.
inline double measure_exponent(const TrapParams& params, std::size_t n) {
  return (1.0 - params.gamma()) * static_cast<double>(n) + params.eta() + 1.0;
}

namespace detail {

// ln f(n)! with f(n)! = f(n) f(n-1) ... f(0).
inline double log_f_factorial(const TrapParams& params, std::size_t n) {
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) total += 0.5 * std::log(f_squared(params, k));
  return total;
}

}  // namespace detail

/// m_f(r) for level n, including the 1 / C_f^2(r) factor.
inline double measure_density(const TrapParams& params, std::size_t n, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::domain_error("measure_density: r must be positive and finite");
  }
  detail::check_level(n, params.top_level(), "measure_density");
  const double nu = measure_order(params, n);
  const double l = measure_exponent(params, n);
  const double log_cf = coherent_state(params, {r, 0.0}).log_norm_const();
  return std::exp(numerics::log_bessel_k(nu, r) - l * std::numbers::ln2 - std::log(std::numbers::pi) -
                  nu * std::log(r) - 2.0 * log_cf);
}

/// Gamma(1 + eta - gamma n) / (f(n)!)^2, the level-n moment in simplified form.
inline double moment_gamma_form(const TrapParams& params, std::size_t n) {
  detail::check_level(n, params.top_level(), "moment_gamma_form");
  return std::exp(std::lgamma(1.0 + params.eta() - params.gamma() * static_cast<double>(n)) -
                  2.0 * detail::log_f_factorial(params, n));
}

struct MomentReport {
  std::size_t n = 0;
  double nu_n = 0.0;
  double l_n = 0.0;
  double computed_moment = 0.0;  ///< quadrature
  double analytic_moment = 0.0;  ///< Bessel-moment identity
  double target = 1.0;
  double ratio = 0.0;             ///< computed_moment / target
  double quadrature_error = 0.0;  ///< abs error estimate of the quadrature
  double relative_agreement = 0.0;  ///< |computed - analytic| / |analytic|
  bool agrees = false;              ///< relative_agreement <= tol
};

/**
 * Level-n moment of the measure, by quadrature of
 *   2^(1-l) K_nu(r) r^(2n+1-nu) / (n! (f(n)!)^2)
 * and by the identity int K_nu(t) t^(mu-1) dt = 2^(mu-2) Gamma((mu-nu)/2) Gamma((mu+nu)/2)
 * with mu = 2n + 2 - nu.
 *
 * @throws numerics::ConvergenceError if the quadrature does not converge.
 */
inline MomentReport moment_check(const TrapParams& params, std::size_t n, double tol = 1e-10) {
  detail::check_level(n, params.top_level(), "moment_check");
  if (!(tol > 0.0)) throw std::domain_error("moment_check: tol must be positive");

  MomentReport report;
  report.n = n;
  report.nu_n = measure_order(params, n);
  report.l_n = measure_exponent(params, n);
  const double mu = 2.0 * static_cast<double>(n) + 2.0 - report.nu_n;
  if (!(mu > std::fabs(report.nu_n))) {
    throw std::domain_error("moment_check: moment integral diverges at level " + std::to_string(n));
  }

  const double log_prefactor = (1.0 - report.l_n) * std::numbers::ln2 - numerics::log_factorial(n) -
                               2.0 * detail::log_f_factorial(params, n);
  const double power = mu - 1.0;  // 2n + 1 - nu
  const double nu = report.nu_n;
  auto integrand = [&](double r) {
    return std::exp(log_prefactor + numerics::log_bessel_k(nu, r) + power * std::log(r));
  };
  const numerics::QuadratureResult quad = numerics::integrate_semi_infinite(integrand, 0.1 * tol);

  report.computed_moment = quad.value;
  report.quadrature_error = quad.abs_error_estimate;
  report.analytic_moment = std::exp(log_prefactor + numerics::log_kv_moment_closed_form(mu, nu));
  report.ratio = report.computed_moment / report.target;
  report.relative_agreement =
      std::fabs(report.computed_moment - report.analytic_moment) / std::fabs(report.analytic_moment);
  report.agrees = report.relative_agreement <= tol;
  return report;
}

struct ResolutionReport {
  std::vector<MomentReport> levels;
  /// Levels with |ratio - 1| > ratio_tolerance.
  std::vector<std::size_t> flagged;
  double ratio_tolerance = 1e-6;
  /// True when every level's quadrature matched the identity.
  bool all_agree = true;
};

/// Largest trap audited without an explicit level cap.
inline constexpr std::size_t kResolutionAuditLimit = 500;

/**
 * moment_check for every bound level, or for the lowest max_levels levels.
 * Traps with more than kResolutionAuditLimit levels require a cap.
 */
inline ResolutionReport resolution_report(const TrapParams& params,
                                          std::optional<std::size_t> max_levels = std::nullopt,
                                          double tol = 1e-10) {
  std::size_t count = params.num_bound();
  if (max_levels) {
    count = std::min(count, *max_levels);
  } else if (count > kResolutionAuditLimit) {
    throw std::invalid_argument("resolution_report: trap has " + std::to_string(count) +
                                " levels; pass a level cap above " +
                                std::to_string(kResolutionAuditLimit));
  }
  ResolutionReport out;
  for (std::size_t n = 0; n < count; ++n) {
    MomentReport level = moment_check(params, n, tol);
    if (std::fabs(level.ratio - 1.0) > out.ratio_tolerance) out.flagged.push_back(n);
    out.all_agree = out.all_agree && level.agrees;
    out.levels.push_back(level);
  }
  return out;
}

}  // namespace mpt
