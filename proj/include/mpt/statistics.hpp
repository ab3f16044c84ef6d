#pragma once

/**
 * @file statistics.hpp
 * @brief Nonclassicality measures of deformed coherent states: Mandel Q,
 *        the invariant squeezing coefficient S and phase-resolved
 *        quadrature variances, plus parameter sweeps over N.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mpt/states.hpp"

namespace mpt {

struct MandelReport {
  double value = 0.0;
  /// <n> = 0: Q is reported as -1, the limit for a trap holding only its ground state.
  bool vacuum_convention = false;
};

/// Q = (<n^2> - <n>^2) / <n> - 1, with Q := -1 when <n> = 0.
inline MandelReport mandel_report(const DeformedState& state) {
  const NumberMoments m = number_moments(state);
  if (m.mean_n == 0.0) return {-1.0, true};
  return {(m.mean_n2 - m.mean_n * m.mean_n) / m.mean_n - 1.0, false};
}

inline double mandel_q(const DeformedState& state) { return mandel_report(state).value; }

/// S = <a^dag a> - |<a>|^2 - |<a^2> - <a>^2|; S < 0 signals quadrature squeezing.
inline double squeezing_s(const DeformedState& state) {
  const LadderMoments m = ladder_moments(state);
  return m.mean_adag_a - std::norm(m.mean_a) - std::abs(m.mean_a2 - m.mean_a * m.mean_a);
}

struct QuadratureReport {
  double phi = 0.0;
  double var_q = 0.0;
  double var_p = 0.0;
};

/**
 * Variances of q_phi = (a e^{-i phi} + a^dag e^{i phi}) / sqrt(2) and its
 * conjugate p_phi = q_{phi + pi/2}:
 *   var = 1/2 + <a^dag a> - |<a>|^2 +/- Re(e^{-2 i phi} (<a^2> - <a>^2)).
 */
inline QuadratureReport quadrature_variance(const DeformedState& state, double phi) {
  if (!std::isfinite(phi)) throw std::domain_error("quadrature_variance: phi must be finite");
  const LadderMoments m = ladder_moments(state);
  const double base = 0.5 + m.mean_adag_a - std::norm(m.mean_a);
  const double swing = (std::polar(1.0, -2.0 * phi) * (m.mean_a2 - m.mean_a * m.mean_a)).real();
  return {phi, base + swing, base - swing};
}

/// Phase at which var_q is smallest: Re(e^{-2i phi} z) = -|z| at phi = (arg z - pi) / 2.
inline double min_variance_phase(const DeformedState& state) {
  const LadderMoments m = ladder_moments(state);
  return 0.5 * (std::arg(m.mean_a2 - m.mean_a * m.mean_a) - std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Sweeps over the depth parameter
// ---------------------------------------------------------------------------

enum class Metric { MandelQ, SqueezingS };

struct SweepRow {
  double depth_parameter = 0.0;
  double value = 0.0;
};

inline double evaluate_metric(double depth_parameter, double alpha_abs, Metric metric) {
  const DeformedState state = coherent_state(new_trap(depth_parameter), {alpha_abs, 0.0});
  return metric == Metric::MandelQ ? mandel_q(state) : squeezing_s(state);
}

/**
 * One row per grid point, in grid order. Points are independent and are
 * spread over `threads` workers (0 = hardware concurrency); results do not
 * depend on the thread count.
 *
 * @throws std::domain_error naming the first failing N in grid order.
 */
inline std::vector<SweepRow> sweep_metric(std::span<const double> grid, double alpha_abs, Metric metric,
                                          unsigned threads = 0) {
  if (!std::isfinite(alpha_abs) || alpha_abs < 0.0) {
    throw std::domain_error("sweep_metric: |alpha| must be finite and non-negative");
  }
  std::vector<SweepRow> rows(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rows[i].depth_parameter = grid[i];
      try {
        rows[i].value = evaluate_metric(grid[i], alpha_abs, metric);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(grid.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw std::domain_error("sweep_metric: N = " + std::to_string(grid[i]) + ": " + e.what());
    }
  }
  return rows;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("grid: steps must be positive");
  if (steps == 1) return {lo};
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return grid;
}

/// Logarithmically spaced points; the endpoints are reproduced exactly.
inline std::vector<double> log_grid(double lo, double hi, std::size_t steps) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::domain_error("grid: logarithmic grid needs positive bounds");
  std::vector<double> grid = linear_grid(std::log(lo), std::log(hi), steps);
  for (double& v : grid) v = std::exp(v);
  grid.front() = lo;
  if (steps > 1) grid.back() = hi;
  return grid;
}

/// Default Mandel-Q sweep: 400 log-spaced N over [4, 1e3].
inline std::vector<double> mandel_default_grid() { return log_grid(4.0, 1e3, 400); }

/// Default squeezing sweep: 400 log-spaced N over [1, 1e3].
inline std::vector<double> squeezing_default_grid() { return log_grid(1.0, 1e3, 400); }

}  // namespace mpt
