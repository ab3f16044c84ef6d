#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpt/spectrum.hpp"
#include "output.hpp"

namespace mptosc {

/// Exit codes of the command-line front end.
enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2 };

/// Parses "a", "a+bi", "a-bi", "bi", "i", "-i" (j is accepted for i).
/// Returns nullopt on malformed input.
std::optional<std::complex<double>> parse_complex(std::string_view text);

/// Data behind the three figures: 1 = potential curves, 2 = Mandel Q sweeps,
/// 3 = squeezing sweeps. Long format with a series column.
OutputRecord emit_figure_data(int figure);

struct CheckResult {
  std::string name;
  enum class Status { Pass, Fail, Skipped } status = Status::Pass;
  double value = 0.0;      ///< measured residual or statistic
  double threshold = 0.0;  ///< pass bound for value
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::vector<std::string> failures() const;
};

/// Runs every module's invariants for one trap and coherent-state label.
VerifyReport verify_suite(const mpt::TrapParams& params, std::complex<double> alpha, double tol);

/// Entry point without the program name. Output goes to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mptosc
