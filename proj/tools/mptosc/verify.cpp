#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mpt/mpt.hpp"

namespace mptosc {

namespace {

// Deep traps are checked on their lowest levels only.
constexpr std::size_t kSpectrumCheckLevels = 100000;
constexpr std::size_t kOperatorCheckLevels = 4096;
constexpr std::size_t kDeepTrapAuditLevels = 5;
constexpr int kPhaseSamples = 8;
constexpr int kVarianceScan = 360;

class Collector {
 public:
  void bound(std::string name, double value, double threshold, std::string detail = {}) {
    const bool ok = std::isfinite(value) && value <= threshold;
    push(std::move(name), ok, value, threshold, std::move(detail));
  }
  void flag(std::string name, bool ok, double value, double threshold, std::string detail = {}) {
    push(std::move(name), ok, value, threshold, std::move(detail));
  }
  void skip(std::string name, std::string detail) {
    report_.checks.push_back({std::move(name), CheckResult::Status::Skipped, 0.0, 0.0, std::move(detail)});
  }
  VerifyReport take() { return std::move(report_); }

 private:
  void push(std::string name, bool ok, double value, double threshold, std::string detail) {
    report_.checks.push_back({std::move(name), ok ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                              value, threshold, std::move(detail)});
  }
  VerifyReport report_;
};

double relative_gap(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

void spectrum_checks(const mpt::TrapParams& params, Collector& c) {
  const std::size_t levels = std::min(params.num_bound(), kSpectrumCheckLevels);
  double worst = 0.0;
  bool ordered = mpt::energy_deformed_form(params, 0) > 0.0;
  double previous = -1.0;
  for (std::size_t n = 0; n < levels; ++n) {
    const double deformed = mpt::energy_deformed_form(params, n);
    worst = std::max({worst, relative_gap(mpt::energy_well_form(params, n), deformed),
                      relative_gap(mpt::energy_hamiltonian_form(params, n), deformed)});
    ordered = ordered && deformed > previous && deformed < params.depth();
    previous = deformed;
  }
  c.bound("spectrum.triple_consistency", worst, 1e-12, std::to_string(levels) + " levels");
  c.flag("spectrum.ordering", ordered, ordered ? 0.0 : 1.0, 0.0, "0 < E_0 < E_1 < ... < D");
}

void operator_checks(const mpt::TrapParams& params, double tol, Collector& c) {
  const auto extended = mpt::new_trap<long double>(params.depth_parameter());
  const auto commutator = mpt::check_deformed_commutator(extended, kOperatorCheckLevels);
  c.bound("operators.deformed_commutator", static_cast<double>(commutator.max_abs_residual), tol,
          "interior rows, extended precision");
  c.bound("operators.number_ladder_relations", static_cast<double>(commutator.ladder_relation_residual), 0.0,
          "[n,A] + A and [n,A^dag] - A^dag");
  const auto su2 = mpt::check_su2(extended, kOperatorCheckLevels);
  c.bound("operators.su2", static_cast<double>(std::max(su2.max_abs_residual, su2.ladder_relation_residual)),
          tol, "[J+,J-] = 2 J0 interior, [J0,J+-] = +-J+- full");

  const std::vector<double> grid = mpt::log_grid(1e2, 1e6, 9);
  const auto scaling = mpt::q_relation_scaling<double>(grid);
  c.flag("operators.q_relation_slope", std::fabs(scaling.slope + 1.0) <= 0.1, scaling.slope, 0.1,
         "log-log slope over N in [1e2, 1e6], expected -1");

  const auto h = mpt::hamiltonian(params, {mpt::Representation::Ghost, kOperatorCheckLevels});
  double worst = 0.0;
  for (std::size_t n = 0; n < h.dim(); ++n) {
    worst = std::max(worst, relative_gap(h(n, n).real(), mpt::energy_deformed_form(params, n)));
  }
  c.bound("operators.hamiltonian_diagonal", worst, 1e-12, "ghost-level H vs E_n");
}

void state_checks(const mpt::TrapParams& params, std::complex<double> alpha, double tol, Collector& c) {
  const auto state = mpt::coherent_state(params, alpha);
  double norm = 0.0;
  for (const auto& v : state.coeffs()) norm += std::norm(v);
  c.bound("states.normalization", std::fabs(norm - 1.0), 1e-12);

  if (!state.full_support() || params.num_bound() > mpt::kDenseOracleLimit) {
    c.skip("states.oracle_equivalence", "dense oracle limited to 2000 levels");
    c.skip("states.annihilation_residual", "state support is truncated");
    return;
  }

  const auto boson = mpt::build_boson_ops(params.num_bound());
  const auto n2 = boson.n_hat * boson.n_hat;
  const auto a2 = boson.a * boson.a;
  double worst = 0.0;
  for (int k = 0; k < kPhaseSamples; ++k) {
    const auto rotated = mpt::coherent_state(
        params, std::polar(std::abs(alpha), std::arg(alpha) + 2.0 * std::numbers::pi * k / kPhaseSamples));
    const auto nm = mpt::number_moments(rotated);
    const auto lm = mpt::ladder_moments(rotated);
    worst = std::max({worst, std::abs(mpt::oracle_expectation(rotated, boson.n_hat) - nm.mean_n),
                      std::abs(mpt::oracle_expectation(rotated, n2) - nm.mean_n2),
                      std::abs(mpt::oracle_expectation(rotated, boson.a) - lm.mean_a),
                      std::abs(mpt::oracle_expectation(rotated, a2) - lm.mean_a2)});
  }
  c.bound("states.oracle_equivalence", worst, tol, "<n>, <n^2>, <a>, <a^2> over 8 phases");

  const auto residual = mpt::annihilation_residual(state);
  c.bound("states.annihilation_residual", residual.closed_form_mismatch, 1e-12,
          "matrix A|alpha,f> - alpha|alpha,f> vs closed-form top amplitude");
}

void statistics_checks(const mpt::TrapParams& params, std::complex<double> alpha, Collector& c) {
  const auto state = mpt::coherent_state(params, alpha);
  const double s = mpt::squeezing_s(state);
  const double q = mpt::mandel_q(state);

  const double analytic_min = mpt::quadrature_variance(state, mpt::min_variance_phase(state)).var_q;
  double scan_min = analytic_min;
  double worst_uncertainty = 0.0;
  for (int k = 0; k < kVarianceScan; ++k) {
    const auto report = mpt::quadrature_variance(state, std::numbers::pi * k / kVarianceScan);
    scan_min = std::min(scan_min, report.var_q);
    worst_uncertainty = std::max(worst_uncertainty, 0.25 - report.var_q * report.var_p);
  }
  c.bound("statistics.min_variance_equals_s",
          std::max(std::fabs(analytic_min - 0.5 - s), analytic_min - scan_min), 1e-12,
          "min_phi var_q - 1/2 vs S");
  c.bound("statistics.uncertainty", worst_uncertainty, 1e-12, "1/4 - var_q var_p over 360 phases");

  double drift = 0.0;
  for (int k = 1; k < kPhaseSamples; ++k) {
    const auto rotated = mpt::coherent_state(
        params, std::polar(std::abs(alpha), std::arg(alpha) + 2.0 * std::numbers::pi * k / kPhaseSamples));
    drift = std::max({drift, std::fabs(mpt::mandel_q(rotated) - q), std::fabs(mpt::squeezing_s(rotated) - s)});
  }
  c.bound("statistics.phase_invariance", drift, 1e-12, "Q and S over 8 phases of alpha");
  c.flag("statistics.mandel_lower_bound", q >= -1.0, q, -1.0, "Q >= -1");

  if (params.num_bound() == 1) {
    c.flag("statistics.single_bound_state", q == -1.0 && s == 0.0, std::fabs(q + 1.0) + std::fabs(s), 0.0,
           "Q = -1 and S = 0 when only the ground state is bound");
  } else {
    c.skip("statistics.single_bound_state", "trap holds more than one bound state");
  }
}

void measure_checks(const mpt::TrapParams& params, Collector& c) {
  const bool deep = params.num_bound() > mpt::kResolutionAuditLimit;
  const auto report = mpt::resolution_report(
      params, deep ? std::optional<std::size_t>(kDeepTrapAuditLevels) : std::nullopt, 1e-8);
  double worst = 0.0;
  for (const auto& level : report.levels) worst = std::max(worst, level.relative_agreement);
  c.bound("measure.quadrature_vs_gamma_identity", worst, 1e-8,
          std::to_string(report.levels.size()) + " levels; " + std::to_string(report.flagged.size()) +
              " with |ratio - 1| > 1e-6");
}

}  // namespace

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& r) { return r.status == CheckResult::Status::Fail; });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> names;
  for (const auto& r : checks) {
    if (r.status == CheckResult::Status::Fail) names.push_back(r.name);
  }
  return names;
}

VerifyReport verify_suite(const mpt::TrapParams& params, std::complex<double> alpha, double tol) {
  Collector collector;
  spectrum_checks(params, collector);
  operator_checks(params, tol, collector);
  state_checks(params, alpha, tol, collector);
  statistics_checks(params, alpha, collector);
  measure_checks(params, collector);
  return collector.take();
}

}  // namespace mptosc
