#include <stdexcept>
#include <string>

#include "commands.hpp"
#include "mpt/statistics.hpp"

namespace mptosc {

namespace {

OutputRecord potential_curves() {
  OutputRecord record;
  record.command = "figure";
  record.params_echo["figure"] = 1;
  record.columns = {"series", "D", "x", "V"};
  // D -> infinity is drawn with D = 1e6, which is harmonic to plotting accuracy.
  const struct {
    double depth;
    const char* label;
  } series[] = {{1.0, "D=1"}, {2.0, "D=2"}, {1e6, "D=1e6 (harmonic proxy)"}};
  const std::vector<double> xs = mpt::linear_grid(-5.0, 5.0, 401);
  for (const auto& s : series) {
    const auto trap = mpt::trap_from_depth(s.depth);
    for (const double x : xs) {
      record.rows.push_back({std::string(s.label), s.depth, x, mpt::potential(trap, x)});
    }
  }
  return record;
}

OutputRecord metric_curves(int figure, mpt::Metric metric, const std::vector<double>& alphas,
                           const std::vector<double>& grid) {
  OutputRecord record;
  record.command = "figure";
  record.params_echo["figure"] = figure;
  record.columns = {"series", "alpha_abs", "N", metric == mpt::Metric::MandelQ ? "Q" : "S"};
  for (const double alpha : alphas) {
    const std::string label = "|alpha|=" + format_number(alpha);
    for (const auto& row : mpt::sweep_metric(grid, alpha, metric)) {
      record.rows.push_back({label, alpha, row.depth_parameter, row.value});
    }
  }
  return record;
}

}  // namespace

OutputRecord emit_figure_data(int figure) {
  switch (figure) {
    case 1:
      return potential_curves();
    case 2:
      return metric_curves(2, mpt::Metric::MandelQ, {3.0, 4.0, 5.0, 7.0}, mpt::mandel_default_grid());
    case 3:
      return metric_curves(3, mpt::Metric::SqueezingS, {0.5, 1.0, 1.3}, mpt::squeezing_default_grid());
    default:
      throw std::invalid_argument("figure: id must be 1, 2 or 3");
  }
}

}  // namespace mptosc
