#pragma once

/**
 * @file spectrum.hpp
 * @brief Modified Poschl-Teller trap parameters, bound spectrum, and the
 *        deformation function of the equivalent f-deformed oscillator.
 *
 * Natural units hbar = m = omega = 1 throughout. The dimensionless depth
 * N = 4D/(hbar omega) is the only free parameter: D = N/4, and the range
 * delta = sqrt(N/2) follows from D = m omega^2 delta^2 / 2.
 *
 * All functions are templated on the floating-point type so the algebra
 * checks can run in extended precision.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpt {

/// |s - round(s)| below this treats s as an integer.
inline constexpr double kIntegerSTolerance = 1e-9;

template <std::floating_point Real>
class BasicTrapParams {
 public:
  /// Validates N and derives every dependent quantity.
  static BasicTrapParams from_depth_parameter(Real depth_parameter) {
    if (!std::isfinite(depth_parameter) || !(depth_parameter > 0)) {
      throw std::domain_error("trap: N must be positive and finite, got " +
                              std::to_string(static_cast<double>(depth_parameter)));
    }
    BasicTrapParams p;
    const Real N = depth_parameter;
    const Real root = std::sqrt(Real{1} + N * N);  // sqrt(1 + N^2) = N * eta
    p.n_ = N;
    // (sqrt(1+N^2) - 1)/2 rewritten without cancellation at small N.
    p.s_ = N * N / (Real{2} * (root + Real{1}));
    p.gamma_ = Real{1} / N;
    p.eta_ = root / N;
    p.depth_ = N / Real{4};
    p.range_ = std::sqrt(N / Real{2});

    const Real nearest = std::round(p.s_);
    // s near 0 is a very shallow trap, which still binds its ground state.
    p.integer_s_ = nearest >= Real{1} && std::fabs(p.s_ - nearest) < static_cast<Real>(kIntegerSTolerance);
    p.num_bound_ = p.integer_s_ ? static_cast<std::size_t>(nearest)
                                : static_cast<std::size_t>(std::floor(p.s_)) + 1;
    return p;
  }

  Real depth_parameter() const noexcept { return n_; }  ///< N = 4D / hbar omega
  Real s() const noexcept { return s_; }
  std::size_t num_bound() const noexcept { return num_bound_; }
  std::size_t top_level() const noexcept { return num_bound_ - 1; }
  Real gamma() const noexcept { return gamma_; }  ///< 1/N
  Real eta() const noexcept { return eta_; }      ///< sqrt(1 + 1/N^2)
  Real depth() const noexcept { return depth_; }  ///< D, units of hbar omega
  Real range() const noexcept { return range_; }  ///< delta, natural length units
  /// True when s was within kIntegerSTolerance of an integer; then num_bound = s.
  bool integer_s() const noexcept { return integer_s_; }

 private:
  BasicTrapParams() = default;

  Real n_{};
  Real s_{};
  std::size_t num_bound_ = 1;
  Real gamma_{};
  Real eta_{};
  Real depth_{};
  Real range_{};
  bool integer_s_ = false;
};

using TrapParams = BasicTrapParams<double>;
using ExtendedTrapParams = BasicTrapParams<long double>;

template <std::floating_point Real>
BasicTrapParams<Real> new_trap(Real depth_parameter) {
  return BasicTrapParams<Real>::from_depth_parameter(depth_parameter);
}

/// Trap of well depth D (units hbar omega), i.e. N = 4D.
template <std::floating_point Real>
BasicTrapParams<Real> trap_from_depth(Real depth) {
  if (!std::isfinite(depth) || !(depth > 0)) {
    throw std::domain_error("trap: depth D must be positive and finite");
  }
  return new_trap(Real{4} * depth);
}

namespace detail {

inline void check_level(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit) {
    throw std::out_of_range(std::string(what) + ": level " + std::to_string(n) +
                            " outside allowed range [0, " + std::to_string(limit) + "]");
  }
}

}  // namespace detail

/// V(x) = D tanh^2(x / delta).
template <std::floating_point Real>
Real potential(const BasicTrapParams<Real>& params, Real x) {
  if (std::isinf(x)) return params.depth();
  const Real t = std::tanh(x / params.range());
  return params.depth() * t * t;
}

/**
 * E_n = D - (s - n)^2 / (4D), units hbar omega.
 *
 * Evaluated as the difference of squares (2D - (s-n))(2D + (s-n)) / 4D with
 * 2D - s = N / (N + 1 + sqrt(1+N^2)), which keeps the low levels accurate
 * when D is large.
 */
template <std::floating_point Real>
Real energy_well_form(const BasicTrapParams<Real>& params, std::size_t n) {
  detail::check_level(n, params.top_level(), "energy_well_form");
  const Real N = params.depth_parameter();
  const Real level = static_cast<Real>(n);
  const Real below_rim = N / (N + Real{1} + std::sqrt(Real{1} + N * N)) + level;  // 2D - (s-n)
  const Real above_rim = N / Real{2} + params.s() - level;                        // 2D + (s-n)
  return below_rim * above_rim / N;
}

/// E_n = -n^2/N + (eta - 1/N) n + (eta - 1/N)/2, units hbar omega.
template <std::floating_point Real>
Real energy_deformed_form(const BasicTrapParams<Real>& params, std::size_t n) {
  detail::check_level(n, params.top_level(), "energy_deformed_form");
  const Real level = static_cast<Real>(n);
  const Real slope = params.eta() - params.gamma();
  return -level * level * params.gamma() + slope * level + slope / Real{2};
}

/// Deformation function f^2(n) = eta - n/N. Defined up to top_level + 1.
template <std::floating_point Real>
Real f_squared(const BasicTrapParams<Real>& params, std::size_t n) {
  detail::check_level(n, params.top_level() + 1, "f_squared");
  return params.eta() - static_cast<Real>(n) * params.gamma();
}

/// E_n = [(n+1) f^2(n+1) + n f^2(n)] / 2, the eigenvalues of (A^dag A + A A^dag)/2.
template <std::floating_point Real>
Real energy_hamiltonian_form(const BasicTrapParams<Real>& params, std::size_t n) {
  detail::check_level(n, params.top_level(), "energy_hamiltonian_form");
  const Real level = static_cast<Real>(n);
  return ((level + Real{1}) * f_squared(params, n + 1) + level * f_squared(params, n)) / Real{2};
}

/// Delta_n = (E_{n+1} - E_n) - 1 = -2n/N + eta - 2/N - 1, for n <= top_level - 1.
template <std::floating_point Real>
Real delta_param(const BasicTrapParams<Real>& params, std::size_t n) {
  if (params.num_bound() < 2 || n + 1 > params.top_level()) {
    throw std::out_of_range("delta_param: level " + std::to_string(n) +
                            " has no bound successor (top level " +
                            std::to_string(params.top_level()) + ")");
  }
  const Real two_over_n = Real{2} * params.gamma();
  return -two_over_n * static_cast<Real>(n) + params.eta() - two_over_n - Real{1};
}

template <std::floating_point Real>
struct BasicBoundSpectrum {
  BasicTrapParams<Real> params;
  std::vector<Real> levels;  ///< E_n, units hbar omega
  std::vector<Real> deltas;  ///< Delta_n for every listed level that has a bound successor
};

using BoundSpectrum = BasicBoundSpectrum<double>;

/// Bound energies and spacing deviations. With max_levels set, only the
/// lowest max_levels levels are listed (deep traps have ~N/2 levels).
template <std::floating_point Real>
BasicBoundSpectrum<Real> bound_spectrum(const BasicTrapParams<Real>& params,
                                        std::optional<std::size_t> max_levels = std::nullopt) {
  std::size_t count = params.num_bound();
  if (max_levels) count = std::min(count, *max_levels);
  BasicBoundSpectrum<Real> out{params, {}, {}};
  out.levels.reserve(count);
  for (std::size_t n = 0; n < count; ++n) out.levels.push_back(energy_deformed_form(params, n));
  const std::size_t delta_count = std::min(count, params.num_bound() - 1);
  out.deltas.reserve(delta_count);
  for (std::size_t n = 0; n < delta_count; ++n) out.deltas.push_back(delta_param(params, n));
  return out;
}

}  // namespace mpt
