#pragma once

/**
 * @file states.hpp
 * @brief f-deformed bound coherent states of the trap and their moments.
 *
 * |alpha, f> = C_f sum_{n=0}^{top} alpha^n / (sqrt(n!) f(n)!) |n>,
 * f(n)! = f(n) f(n-1) ... f(0).
 *
 * Coefficient magnitudes are built in log space with the phase n arg(alpha)
 * carried separately. Traps with more than kDenseOracleLimit levels keep only
 * the numerically relevant support: terms are strictly decreasing once
 * |alpha|^2 < (n+1) f^2(n+1), so the geometric tail bound is rigorous.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpt/numerics.hpp"
#include "mpt/operators.hpp"
#include "mpt/spectrum.hpp"

namespace mpt {

/// Largest trap (in bound levels) for which full-support states and the
/// dense expectation oracle are used.
inline constexpr std::size_t kDenseOracleLimit = 2000;

/// Relative weight below which the remaining tail of a deep-trap state is dropped.
inline constexpr double kTailTolerance = 1e-18;

/// Whether f(n)! includes the factor f(0). It is common to every term, so
/// normalized states do not depend on the choice.
enum class FactorialConvention { IncludeZero, ExcludeZero };

class DeformedState {
 public:
  const TrapParams& params() const noexcept { return params_; }
  std::complex<double> alpha() const noexcept { return alpha_; }
  /// Normalized amplitudes c_n for n < support().
  const std::vector<std::complex<double>>& coeffs() const noexcept { return coeffs_; }
  /// ln|alpha^n / (sqrt(n!) f(n)!)| for n < support().
  const std::vector<double>& log_mags() const noexcept { return log_mags_; }
  /// C_f. Underflows to 0 when |alpha| is very large; log_norm_const() stays finite.
  double norm_const() const noexcept { return std::exp(log_norm_const_); }
  double log_norm_const() const noexcept { return log_norm_const_; }
  std::size_t support() const noexcept { return coeffs_.size(); }
  /// True when every bound level is represented.
  bool full_support() const noexcept { return coeffs_.size() == params_.num_bound(); }
  FactorialConvention convention() const noexcept { return convention_; }

  friend DeformedState coherent_state(const TrapParams&, std::complex<double>, FactorialConvention);

 private:
  DeformedState(const TrapParams& params, std::complex<double> alpha, FactorialConvention convention)
      : params_(params), alpha_(alpha), convention_(convention) {}

  TrapParams params_;
  std::complex<double> alpha_;
  FactorialConvention convention_;
  std::vector<std::complex<double>> coeffs_;
  std::vector<double> log_mags_;
  double log_norm_const_ = 0.0;
};

inline DeformedState coherent_state(const TrapParams& params, std::complex<double> alpha,
                                    FactorialConvention convention = FactorialConvention::IncludeZero) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw std::domain_error("coherent_state: alpha must be finite");
  }
  const double modulus = std::abs(alpha);
  if (modulus > 1e100) {
    throw std::overflow_error("coherent_state: |alpha| > 1e100 is outside the representable range");
  }

  DeformedState state(params, alpha, convention);
  const std::size_t levels = params.num_bound();
  const bool truncate = levels > kDenseOracleLimit;
  const double log_alpha = modulus > 0.0 ? std::log(modulus) : -std::numeric_limits<double>::infinity();

  // Streaming log-sum-exp of |term_n|^2.
  double log_f_factorial = convention == FactorialConvention::IncludeZero
                               ? 0.5 * std::log(f_squared(params, 0))
                               : 0.0;
  double running_max = 0.0;  // term 0 has log magnitude -log f(0)! <= ~0
  double scaled_sum = 0.0;
  auto& log_mags = state.log_mags_;
  for (std::size_t n = 0; n < levels; ++n) {
    if (n > 0) log_f_factorial += 0.5 * std::log(f_squared(params, n));
    const double log_mag = n == 0 ? -log_f_factorial
                                  : static_cast<double>(n) * log_alpha -
                                        0.5 * numerics::log_factorial(n) - log_f_factorial;
    log_mags.push_back(log_mag);
    if (n == 0) {
      running_max = log_mag;
      scaled_sum = 1.0;
    } else if (std::isfinite(log_mag)) {
      if (log_mag > running_max) {
        scaled_sum = scaled_sum * std::exp(2.0 * (running_max - log_mag)) + 1.0;
        running_max = log_mag;
      } else {
        scaled_sum += std::exp(2.0 * (log_mag - running_max));
      }
    }
    if (truncate && n + 1 < levels) {
      // Squared ratio of the next term to this one; later ratios are smaller.
      const double next = static_cast<double>(n + 1) * f_squared(params, n + 1);
      const double ratio = modulus * modulus / next;
      if (ratio < 1.0) {
        const double tail = std::exp(2.0 * (log_mag - running_max)) * ratio / (1.0 - ratio);
        if (tail < kTailTolerance * scaled_sum) break;
      }
    }
  }

  const double log_norm_sq = 2.0 * running_max + std::log(scaled_sum);
  state.log_norm_const_ = -0.5 * log_norm_sq;
  const double phase = std::arg(alpha);
  state.coeffs_.reserve(log_mags.size());
  for (std::size_t n = 0; n < log_mags.size(); ++n) {
    const double magnitude = std::exp(log_mags[n] + state.log_norm_const_);
    state.coeffs_.push_back(std::polar(magnitude, static_cast<double>(n) * phase));
  }
  return state;
}

/// C_f(r) for alpha = r (C_f depends on |alpha| only).
inline double norm_const(const TrapParams& params, double modulus) {
  return coherent_state(params, {modulus, 0.0}).norm_const();
}

struct AnnihilationResidual {
  /// A|alpha,f> - alpha|alpha,f> from the operator matrices.
  std::vector<std::complex<double>> residual_vector;
  double norm = 0.0;
  /// -C_f alpha^(top+1) / (sqrt(top!) f(top)!), the closed-form amplitude on |top>.
  std::complex<double> closed_form_top_amplitude;
  /// max_n |residual_vector[n] - closed_form[n]|, closed form zero below top.
  double closed_form_mismatch = 0.0;
};

/**
 * Applies the deformed annihilation matrix to the state and compares the
 * defect A|alpha,f> - alpha|alpha,f> with the closed form, which is
 * supported only on the top bound level.
 *
 * @throws std::invalid_argument for states without full bound support.
 */
inline AnnihilationResidual annihilation_residual(const DeformedState& state) {
  if (!state.full_support()) {
    throw std::invalid_argument("annihilation_residual: requires a state on the full bound basis (" +
                                std::to_string(state.params().num_bound()) + " levels)");
  }
  const TrapParams& params = state.params();
  const auto ops = build_deformed_ops(params);
  const auto& coeffs = state.coeffs();
  AnnihilationResidual out;
  out.residual_vector = ops.A.apply(coeffs);
  for (std::size_t n = 0; n < coeffs.size(); ++n) out.residual_vector[n] -= state.alpha() * coeffs[n];

  double norm_sq = 0.0;
  for (const auto& v : out.residual_vector) norm_sq += std::norm(v);
  out.norm = std::sqrt(norm_sq);

  const std::size_t top = params.top_level();
  const double alpha_modulus = std::abs(state.alpha());
  if (alpha_modulus > 0.0) {
    double log_f_factorial = 0.0;
    const std::size_t first = state.convention() == FactorialConvention::IncludeZero ? 0 : 1;
    for (std::size_t k = first; k <= top; ++k) log_f_factorial += 0.5 * std::log(f_squared(params, k));
    const double log_mag = state.log_norm_const() + static_cast<double>(top + 1) * std::log(alpha_modulus) -
                           0.5 * numerics::log_factorial(top) - log_f_factorial;
    out.closed_form_top_amplitude =
        -std::polar(std::exp(log_mag), static_cast<double>(top + 1) * std::arg(state.alpha()));
  }
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const std::complex<double> expected = n == top ? out.closed_form_top_amplitude : 0.0;
    out.closed_form_mismatch = std::max(out.closed_form_mismatch, std::abs(out.residual_vector[n] - expected));
  }
  return out;
}

struct NumberMoments {
  double mean_n = 0.0;
  double mean_n2 = 0.0;
};

inline NumberMoments number_moments(const DeformedState& state) {
  NumberMoments m;
  const auto& c = state.coeffs();
  for (std::size_t n = 1; n < c.size(); ++n) {
    const double p = std::norm(c[n]);
    const double level = static_cast<double>(n);
    m.mean_n += level * p;
    m.mean_n2 += level * level * p;
  }
  return m;
}

struct LadderMoments {
  std::complex<double> mean_a;
  std::complex<double> mean_a2;
  double mean_adag_a = 0.0;
};

/// <a>, <a^2>, <a^dag a> for the undeformed boson operators.
inline LadderMoments ladder_moments(const DeformedState& state) {
  LadderMoments m;
  const auto& c = state.coeffs();
  for (std::size_t n = 1; n < c.size(); ++n) {
    const double level = static_cast<double>(n);
    m.mean_a += std::conj(c[n - 1]) * c[n] * std::sqrt(level);
    if (n >= 2) m.mean_a2 += std::conj(c[n - 2]) * c[n] * std::sqrt(level * (level - 1.0));
  }
  m.mean_adag_a = number_moments(state).mean_n;
  return m;
}

/**
 * <psi|M|psi> by full dense contraction over every (row, col) pair.
 * Independent of the series formulas above; limited to kDenseOracleLimit levels.
 */
inline std::complex<double> oracle_expectation(const DeformedState& state, const OperatorMatrix& op) {
  const auto& c = state.coeffs();
  if (op.dim() != state.params().num_bound() || !state.full_support()) {
    throw std::invalid_argument("oracle_expectation: operator '" + op.label() + "' has dimension " +
                                std::to_string(op.dim()) + " but the state spans " +
                                std::to_string(state.params().num_bound()) + " bound levels");
  }
  if (op.dim() > kDenseOracleLimit) {
    throw std::invalid_argument("oracle_expectation: dense oracle limited to " +
                                std::to_string(kDenseOracleLimit) + " levels");
  }
  std::complex<double> total;
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::complex<double> row;
    for (std::size_t j = 0; j < c.size(); ++j) row += op(i, j) * c[j];
    total += std::conj(c[i]) * row;
  }
  return total;
}

}  // namespace mpt
