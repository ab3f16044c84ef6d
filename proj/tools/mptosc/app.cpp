#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mpt/mpt.hpp"

namespace mptosc {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::optional<double> n_param;
  std::optional<double> depth;
  std::string alpha_text = "1";
  std::optional<double> alpha_abs;
  std::string format = "csv";
  double tol = 1e-10;
  std::string out_path;
  std::optional<double> n_min;
  std::optional<double> n_max;
  std::optional<std::size_t> steps;
  bool log_scale = false;
  bool default_grid = false;
  std::optional<std::size_t> max_levels;
  double x_min = -5.0;
  double x_max = 5.0;
  int figure = 0;
};

struct Outcome {
  OutputRecord record;
  int code = kSuccess;
};

void add_trap_flags(CLI::App* sub, Inputs& in) {
  auto* n = sub->add_option("--n-param", in.n_param, "Depth parameter N = 4D");
  auto* d = sub->add_option("--depth", in.depth, "Well depth D in units of hbar omega");
  n->excludes(d);
}

void add_output_flags(CLI::App* sub, Inputs& in) {
  sub->add_option("--format", in.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", in.out_path, "Output file (default: standard output)");
}

void add_alpha_flag(CLI::App* sub, Inputs& in) {
  sub->add_option("--alpha", in.alpha_text, "Coherent-state label, e.g. 2+1i (default 1)");
}

void add_grid_flags(CLI::App* sub, Inputs& in, const char* default_flag) {
  auto* fixed = sub->add_flag(default_flag, in.default_grid, "Use the 400-point figure grid");
  for (auto* opt : {sub->add_option("--n-min", in.n_min, "Smallest N"),
                    sub->add_option("--n-max", in.n_max, "Largest N"),
                    sub->add_option("--steps", in.steps, "Number of grid points (default 400)"),
                    sub->add_flag("--log-scale", in.log_scale, "Logarithmic spacing")}) {
    opt->excludes(fixed);
  }
}

mpt::TrapParams resolve_trap(const Inputs& in) {
  if (in.n_param) return mpt::new_trap(*in.n_param);
  if (in.depth) return mpt::trap_from_depth(*in.depth);
  throw UsageError("one of --n-param or --depth is required");
}

std::complex<double> resolve_alpha(const Inputs& in) {
  const auto alpha = parse_complex(in.alpha_text);
  if (!alpha) throw UsageError("--alpha: cannot parse '" + in.alpha_text + "' as a complex number");
  return *alpha;
}

void echo_trap(OutputRecord& record, const mpt::TrapParams& params) {
  record.params_echo["n_param"] = params.depth_parameter();
}

void echo_alpha(OutputRecord& record, std::complex<double> alpha) {
  record.params_echo["alpha"] = {alpha.real(), alpha.imag()};
}

Outcome spectrum_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  Outcome o;
  o.record.command = "spectrum";
  echo_trap(o.record, params);
  o.record.params_echo["max_levels"] =
      in.max_levels ? nlohmann::ordered_json(*in.max_levels) : nlohmann::ordered_json(nullptr);
  o.record.columns = {"n", "E_n", "delta_n", "f2_n"};
  const auto spectrum = mpt::bound_spectrum(params, in.max_levels);
  for (std::size_t n = 0; n < spectrum.levels.size(); ++n) {
    const Cell delta = n < spectrum.deltas.size() ? Cell{spectrum.deltas[n]} : Cell{Blank{}};
    o.record.rows.push_back(
        {static_cast<std::int64_t>(n), spectrum.levels[n], delta, mpt::f_squared(params, n)});
  }
  return o;
}

Outcome potential_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  const std::size_t steps = in.steps.value_or(401);
  Outcome o;
  o.record.command = "potential";
  echo_trap(o.record, params);
  o.record.params_echo["x_min"] = in.x_min;
  o.record.params_echo["x_max"] = in.x_max;
  o.record.params_echo["steps"] = steps;
  o.record.columns = {"x", "V"};
  for (const double x : mpt::linear_grid(in.x_min, in.x_max, steps)) {
    o.record.rows.push_back({x, mpt::potential(params, x)});
  }
  return o;
}

Outcome state_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  const auto alpha = resolve_alpha(in);
  const auto state = mpt::coherent_state(params, alpha);
  Outcome o;
  o.record.command = "state";
  echo_trap(o.record, params);
  echo_alpha(o.record, alpha);
  o.record.columns = {"n", "re_c_n", "im_c_n", "probability"};
  const auto& c = state.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n) {
    o.record.rows.push_back({static_cast<std::int64_t>(n), c[n].real(), c[n].imag(), std::norm(c[n])});
  }
  return o;
}

Outcome stats_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  const auto alpha = resolve_alpha(in);
  const auto state = mpt::coherent_state(params, alpha);
  const auto moments = mpt::number_moments(state);
  const auto best = mpt::quadrature_variance(state, mpt::min_variance_phase(state));
  Outcome o;
  o.record.command = "stats";
  echo_trap(o.record, params);
  echo_alpha(o.record, alpha);
  o.record.columns = {"num_bound", "mean_n", "mean_n2", "Q", "S", "phi_min", "var_q_min", "var_p_min"};
  o.record.rows.push_back({static_cast<std::int64_t>(params.num_bound()), moments.mean_n, moments.mean_n2,
                           mpt::mandel_q(state), mpt::squeezing_s(state), best.phi, best.var_q, best.var_p});
  return o;
}

Outcome quadrature_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  const auto alpha = resolve_alpha(in);
  const std::size_t steps = in.steps.value_or(181);
  const auto state = mpt::coherent_state(params, alpha);
  Outcome o;
  o.record.command = "quadrature";
  echo_trap(o.record, params);
  echo_alpha(o.record, alpha);
  o.record.params_echo["steps"] = steps;
  o.record.columns = {"phi", "var_q", "var_p", "product"};
  for (const double phi : mpt::linear_grid(0.0, std::numbers::pi, steps)) {
    const auto r = mpt::quadrature_variance(state, phi);
    o.record.rows.push_back({phi, r.var_q, r.var_p, r.var_q * r.var_p});
  }
  return o;
}

Outcome sweep_command(const Inputs& in, mpt::Metric metric) {
  if (!in.alpha_abs) throw UsageError("--alpha-abs is required");
  const bool mandel = metric == mpt::Metric::MandelQ;
  double lo = mandel ? 4.0 : 1.0;
  double hi = 1e3;
  std::size_t steps = 400;
  bool log_scale = true;
  if (!in.default_grid && (in.n_min || in.n_max || in.steps || in.log_scale)) {
    if (!in.n_min || !in.n_max) throw UsageError("--n-min and --n-max must be given together");
    lo = *in.n_min;
    hi = *in.n_max;
    steps = in.steps.value_or(400);
    log_scale = in.log_scale;
  }
  const auto grid = log_scale ? mpt::log_grid(lo, hi, steps) : mpt::linear_grid(lo, hi, steps);

  Outcome o;
  o.record.command = mandel ? "mandel" : "squeeze";
  o.record.params_echo["alpha_abs"] = *in.alpha_abs;
  o.record.params_echo["n_min"] = lo;
  o.record.params_echo["n_max"] = hi;
  o.record.params_echo["steps"] = steps;
  o.record.params_echo["log_scale"] = log_scale;
  o.record.columns = {"N", mandel ? "Q" : "S"};
  for (const auto& row : mpt::sweep_metric(grid, *in.alpha_abs, metric)) {
    o.record.rows.push_back({row.depth_parameter, row.value});
  }
  return o;
}

Outcome measure_command(const Inputs& in) {
  const auto params = resolve_trap(in);
  const auto report = mpt::resolution_report(params, in.max_levels, in.tol);
  Outcome o;
  o.record.command = "measure";
  echo_trap(o.record, params);
  o.record.params_echo["max_levels"] =
      in.max_levels ? nlohmann::ordered_json(*in.max_levels) : nlohmann::ordered_json(nullptr);
  o.record.params_echo["tol"] = in.tol;
  o.record.columns = {"n",     "nu_n",  "l_n",        "computed_moment",   "analytic_moment",
                      "ratio", "flagged", "quadrature_error", "relative_agreement"};
  for (const auto& level : report.levels) {
    const bool flagged = std::fabs(level.ratio - 1.0) > report.ratio_tolerance;
    o.record.rows.push_back({static_cast<std::int64_t>(level.n), level.nu_n, level.l_n, level.computed_moment,
                             level.analytic_moment, level.ratio, static_cast<std::int64_t>(flagged),
                             level.quadrature_error, level.relative_agreement});
  }
  return o;
}

Outcome figure_command(const Inputs& in) { return {emit_figure_data(in.figure), kSuccess}; }

const char* status_name(CheckResult::Status status) {
  switch (status) {
    case CheckResult::Status::Pass:
      return "pass";
    case CheckResult::Status::Fail:
      return "fail";
    default:
      return "skipped";
  }
}

Outcome verify_command(const Inputs& in, std::ostream& err) {
  const auto params = resolve_trap(in);
  const auto alpha = resolve_alpha(in);
  const auto report = verify_suite(params, alpha, in.tol);
  Outcome o;
  o.record.command = "verify";
  echo_trap(o.record, params);
  echo_alpha(o.record, alpha);
  o.record.params_echo["tol"] = in.tol;
  o.record.columns = {"check", "status", "value", "threshold", "detail"};
  for (const auto& check : report.checks) {
    o.record.rows.push_back(
        {check.name, std::string(status_name(check.status)), check.value, check.threshold, check.detail});
  }
  if (!report.passed()) {
    o.code = kVerificationFailed;
    err << "verify: failed checks:";
    for (const auto& name : report.failures()) err << ' ' << name;
    err << '\n';
  }
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deformed-oscillator model of the modified Poschl-Teller trap", "mptosc"};
  app.require_subcommand(1);
  Inputs in;
  std::map<CLI::App*, std::function<Outcome()>> handlers;

  auto* spectrum = app.add_subcommand("spectrum", "Bound energies E_n, spacing deviations and f^2(n)");
  add_trap_flags(spectrum, in);
  spectrum->add_option("--max-levels", in.max_levels, "List only the lowest levels");
  handlers[spectrum] = [&] { return spectrum_command(in); };

  auto* potential = app.add_subcommand("potential", "Trap potential V(x) on a uniform grid");
  add_trap_flags(potential, in);
  potential->add_option("--x-min", in.x_min, "Left end of the grid (default -5)");
  potential->add_option("--x-max", in.x_max, "Right end of the grid (default 5)");
  potential->add_option("--steps", in.steps, "Number of points (default 401)");
  handlers[potential] = [&] { return potential_command(in); };

  auto* state = app.add_subcommand("state", "Number-basis amplitudes of the coherent state");
  add_trap_flags(state, in);
  add_alpha_flag(state, in);
  handlers[state] = [&] { return state_command(in); };

  auto* stats = app.add_subcommand("stats", "Mandel Q, squeezing S and the minimum-variance quadrature");
  add_trap_flags(stats, in);
  add_alpha_flag(stats, in);
  handlers[stats] = [&] { return stats_command(in); };

  auto* quadrature = app.add_subcommand("quadrature", "Quadrature variances over phi in [0, pi]");
  add_trap_flags(quadrature, in);
  add_alpha_flag(quadrature, in);
  quadrature->add_option("--steps", in.steps, "Number of phases (default 181)");
  handlers[quadrature] = [&] { return quadrature_command(in); };

  auto* mandel = app.add_subcommand("mandel", "Mandel Q against N at fixed |alpha|");
  mandel->add_option("--alpha-abs", in.alpha_abs, "|alpha|");
  add_grid_flags(mandel, in, "--fig2-grid");
  handlers[mandel] = [&] { return sweep_command(in, mpt::Metric::MandelQ); };

  auto* squeeze = app.add_subcommand("squeeze", "Squeezing coefficient S against N at fixed |alpha|");
  squeeze->add_option("--alpha-abs", in.alpha_abs, "|alpha|");
  add_grid_flags(squeeze, in, "--fig3-grid");
  handlers[squeeze] = [&] { return sweep_command(in, mpt::Metric::SqueezingS); };

  auto* measure = app.add_subcommand("measure", "Moment audit of the resolution-of-identity measure");
  add_trap_flags(measure, in);
  measure->add_option("--max-levels", in.max_levels, "Audit only the lowest levels");
  measure->add_option("--tol", in.tol, "Relative agreement required (default 1e-10)");
  handlers[measure] = [&] { return measure_command(in); };

  auto* figure = app.add_subcommand("figure", "Data behind figure 1, 2 or 3");
  figure->add_option("id", in.figure, "Figure number")->required()->check(CLI::Range(1, 3));
  handlers[figure] = [&] { return figure_command(in); };

  auto* verify = app.add_subcommand("verify", "Run every invariant check for one trap and alpha");
  add_trap_flags(verify, in);
  add_alpha_flag(verify, in);
  verify->add_option("--tol", in.tol, "Residual bound for the algebra and oracle checks (default 1e-10)");
  handlers[verify] = [&] { return verify_command(in, err); };

  for (auto& [sub, handler] : handlers) add_output_flags(sub, in);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (!(in.tol > 0.0)) throw UsageError("--tol must be positive");
    if (in.alpha_abs && !(*in.alpha_abs >= 0.0)) throw UsageError("--alpha-abs must be non-negative");
    Outcome outcome;
    for (auto& [sub, handler] : handlers) {
      if (sub->parsed()) outcome = handler();
    }
    std::ostringstream buffer;
    write_record(outcome.record, in.format == "json" ? Format::Json : Format::Csv, buffer);
    if (in.out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(in.out_path, std::ios::binary);
      if (!(file << buffer.str())) throw UsageError("cannot write " + in.out_path);
    }
    return outcome.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const mpt::numerics::ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::range_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace mptosc
