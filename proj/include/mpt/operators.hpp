#pragma once

/**
 * @file operators.hpp
 * @brief Matrix realizations of the boson and deformed ladder operators on
 *        the bound-state number basis, plus checkers for the algebra they
 *        satisfy.
 *
 * Convention: annihilators live on the first superdiagonal, a(n-1, n) = sqrt(n).
 *
 * Every operator in this algebra is banded (ladder operators and their
 * products touch only a few diagonals), so BasicOperatorMatrix stores its
 * nonzero diagonals by offset. Entry access, products and adjoints have
 * ordinary dense-matrix semantics; a 5000-level trap costs a few vectors
 * instead of a 400 MB array.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpt/spectrum.hpp"

namespace mpt {

template <std::floating_point Real>
class BasicOperatorMatrix {
 public:
  using value_type = std::complex<Real>;
  using Diagonal = std::vector<value_type>;

  BasicOperatorMatrix(std::size_t dim, std::string label) : dim_(dim), label_(std::move(label)) {
    if (dim == 0) throw std::invalid_argument("operator matrix: dimension must be positive");
  }

  static BasicOperatorMatrix identity(std::size_t dim, std::string label = "I") {
    return diagonal(std::vector<Real>(dim, Real{1}), std::move(label));
  }

  static BasicOperatorMatrix diagonal(const std::vector<Real>& entries, std::string label) {
    BasicOperatorMatrix m(entries.size(), std::move(label));
    Diagonal& d = m.diagonals_[0];
    d.assign(entries.begin(), entries.end());
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }

  BasicOperatorMatrix with_label(std::string label) const {
    BasicOperatorMatrix copy = *this;
    copy.label_ = std::move(label);
    return copy;
  }

  value_type operator()(std::size_t row, std::size_t col) const {
    check_index(row, col);
    const auto offset = static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(row);
    const auto it = diagonals_.find(offset);
    if (it == diagonals_.end()) return value_type{};
    return it->second[std::min(row, col)];
  }

  void set(std::size_t row, std::size_t col, value_type value) {
    check_index(row, col);
    const auto offset = static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(row);
    auto it = diagonals_.find(offset);
    if (it == diagonals_.end()) {
      if (value == value_type{}) return;
      it = diagonals_.emplace(offset, Diagonal(dim_ - offset_size(offset))).first;
    }
    it->second[std::min(row, col)] = value;
  }

  /// Offsets (col - row) of the stored diagonals, ascending.
  std::vector<std::ptrdiff_t> offsets() const {
    std::vector<std::ptrdiff_t> out;
    for (const auto& [offset, diag] : diagonals_) out.push_back(offset);
    return out;
  }

  bool is_diagonal() const {
    return std::all_of(diagonals_.begin(), diagonals_.end(), [](const auto& entry) {
      return entry.first == 0 || std::all_of(entry.second.begin(), entry.second.end(),
                                              [](const value_type& v) { return v == value_type{}; });
    });
  }

  /// Conjugate transpose.
  BasicOperatorMatrix adjoint(std::string label = {}) const {
    BasicOperatorMatrix out(dim_, label.empty() ? label_ + "^dag" : std::move(label));
    for (const auto& [offset, diag] : diagonals_) {
      Diagonal& target = out.diagonals_[-offset];
      target.resize(diag.size());
      std::transform(diag.begin(), diag.end(), target.begin(),
                     [](const value_type& v) { return std::conj(v); });
    }
    return out;
  }

  /// Leading principal block of size dim.
  BasicOperatorMatrix block(std::size_t dim, std::string label = {}) const {
    if (dim == 0 || dim > dim_) throw std::out_of_range("operator matrix: block size out of range");
    BasicOperatorMatrix out(dim, label.empty() ? label_ : std::move(label));
    for (const auto& [offset, diag] : diagonals_) {
      const std::size_t length = offset_size(offset) < dim ? dim - offset_size(offset) : 0;
      if (length == 0) continue;
      out.diagonals_[offset].assign(diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(length));
    }
    return out;
  }

  std::vector<value_type> apply(std::span<const value_type> vec) const {
    if (vec.size() != dim_) throw std::invalid_argument("operator matrix: vector dimension mismatch");
    std::vector<value_type> out(dim_);
    for (const auto& [offset, diag] : diagonals_) {
      for (std::size_t i = 0; i < diag.size(); ++i) {
        const std::size_t row = offset >= 0 ? i : i + offset_size(offset);
        const std::size_t col = offset >= 0 ? i + offset_size(offset) : i;
        out[row] += diag[i] * vec[col];
      }
    }
    return out;
  }

  Real max_abs_entry() const {
    Real best{};
    for (const auto& [offset, diag] : diagonals_) {
      for (const value_type& v : diag) best = std::max(best, std::abs(v));
    }
    return best;
  }

  /// Largest |entry| in a given row.
  Real row_max_abs(std::size_t row) const {
    Real best{};
    for (const auto& [offset, diag] : diagonals_) {
      const auto col = static_cast<std::ptrdiff_t>(row) + offset;
      if (col < 0 || col >= static_cast<std::ptrdiff_t>(dim_)) continue;
      best = std::max(best, std::abs(diag[std::min(row, static_cast<std::size_t>(col))]));
    }
    return best;
  }

  friend BasicOperatorMatrix operator+(const BasicOperatorMatrix& lhs, const BasicOperatorMatrix& rhs) {
    return combine(lhs, rhs, value_type{1}, lhs.label_ + "+" + rhs.label_);
  }

  friend BasicOperatorMatrix operator-(const BasicOperatorMatrix& lhs, const BasicOperatorMatrix& rhs) {
    return combine(lhs, rhs, value_type{-1}, lhs.label_ + "-" + rhs.label_);
  }

  friend BasicOperatorMatrix operator*(value_type scale, const BasicOperatorMatrix& m) {
    BasicOperatorMatrix out = m;
    for (auto& [offset, diag] : out.diagonals_) {
      for (value_type& v : diag) v *= scale;
    }
    return out;
  }

  friend BasicOperatorMatrix operator*(const BasicOperatorMatrix& lhs, const BasicOperatorMatrix& rhs) {
    require_same_dim(lhs, rhs);
    const auto dim = static_cast<std::ptrdiff_t>(lhs.dim_);
    BasicOperatorMatrix out(lhs.dim_, lhs.label_ + rhs.label_);
    for (const auto& [ka, da] : lhs.diagonals_) {
      for (const auto& [kb, db] : rhs.diagonals_) {
        const std::ptrdiff_t kc = ka + kb;
        if (kc <= -dim || kc >= dim) continue;
        // Row i contributes A(i, i+ka) * B(i+ka, i+ka+kb).
        const std::ptrdiff_t first = std::max<std::ptrdiff_t>({0, -ka, -kc});
        const std::ptrdiff_t last = std::min<std::ptrdiff_t>({dim, dim - ka, dim - kc});
        if (first >= last) continue;
        Diagonal& dc = out.diagonals_[kc];
        if (dc.empty()) dc.resize(lhs.dim_ - offset_size(kc));
        for (std::ptrdiff_t i = first; i < last; ++i) {
          const std::ptrdiff_t mid = i + ka;
          dc[static_cast<std::size_t>(kc >= 0 ? i : i + kc)] +=
              da[static_cast<std::size_t>(ka >= 0 ? i : mid)] *
              db[static_cast<std::size_t>(kb >= 0 ? mid : mid + kb)];
        }
      }
    }
    return out;
  }

 private:
  static std::size_t offset_size(std::ptrdiff_t offset) {
    return static_cast<std::size_t>(offset < 0 ? -offset : offset);
  }

  void check_index(std::size_t row, std::size_t col) const {
    if (row >= dim_ || col >= dim_) {
      throw std::out_of_range("operator matrix '" + label_ + "': index (" + std::to_string(row) +
                              ", " + std::to_string(col) + ") outside dimension " +
                              std::to_string(dim_));
    }
  }

  static void require_same_dim(const BasicOperatorMatrix& lhs, const BasicOperatorMatrix& rhs) {
    if (lhs.dim_ != rhs.dim_) {
      throw std::invalid_argument("operator matrix: dimension mismatch (" + lhs.label_ + " is " +
                                  std::to_string(lhs.dim_) + ", " + rhs.label_ + " is " +
                                  std::to_string(rhs.dim_) + ")");
    }
  }

  static BasicOperatorMatrix combine(const BasicOperatorMatrix& lhs, const BasicOperatorMatrix& rhs,
                                     value_type sign, std::string label) {
    require_same_dim(lhs, rhs);
    BasicOperatorMatrix out = lhs;
    out.label_ = std::move(label);
    for (const auto& [offset, diag] : rhs.diagonals_) {
      Diagonal& target = out.diagonals_[offset];
      if (target.empty()) target.resize(diag.size());
      for (std::size_t i = 0; i < diag.size(); ++i) target[i] += sign * diag[i];
    }
    return out;
  }

  std::size_t dim_;
  std::string label_;
  std::map<std::ptrdiff_t, Diagonal> diagonals_;
};

using OperatorMatrix = BasicOperatorMatrix<double>;
using ExtendedOperatorMatrix = BasicOperatorMatrix<long double>;

/// [X, Y]. When either side is diagonal the entries are formed as
/// (d_i - d_j) Y_ij, which is exact for integer spectra such as n.
template <std::floating_point Real>
BasicOperatorMatrix<Real> commutator(const BasicOperatorMatrix<Real>& x,
                                     const BasicOperatorMatrix<Real>& y) {
  const std::string label = "[" + x.label() + "," + y.label() + "]";
  auto diagonal_form = [&](const BasicOperatorMatrix<Real>& d, const BasicOperatorMatrix<Real>& m,
                           bool diag_on_left) {
    if (d.dim() != m.dim()) throw std::invalid_argument("commutator: dimension mismatch");
    BasicOperatorMatrix<Real> out(m.dim(), label);
    for (const std::ptrdiff_t offset : m.offsets()) {
      for (std::size_t row = 0; row < m.dim(); ++row) {
        const auto col = static_cast<std::ptrdiff_t>(row) + offset;
        if (col < 0 || col >= static_cast<std::ptrdiff_t>(m.dim())) continue;
        const auto c = static_cast<std::size_t>(col);
        const auto gap = d(row, row) - d(c, c);
        out.set(row, c, (diag_on_left ? gap : -gap) * m(row, c));
      }
    }
    return out;
  };
  if (x.is_diagonal()) return diagonal_form(x, y, true);
  if (y.is_diagonal()) return diagonal_form(y, x, false);
  return (x * y - y * x).with_label(label);
}

// ---------------------------------------------------------------------------
// Boson and deformed ladder operators
// ---------------------------------------------------------------------------

template <std::floating_point Real>
struct BasicBosonOps {
  BasicOperatorMatrix<Real> a;
  BasicOperatorMatrix<Real> a_dag;
  BasicOperatorMatrix<Real> n_hat;
};

using BosonOps = BasicBosonOps<double>;

/// a, a^dag, n on the lowest dim number states; a^dag|dim-1> is projected to 0.
template <std::floating_point Real = double>
BasicBosonOps<Real> build_boson_ops(std::size_t dim) {
  BasicOperatorMatrix<Real> a(dim, "a");
  std::vector<Real> numbers(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    numbers[n] = static_cast<Real>(n);
    if (n > 0) a.set(n - 1, n, std::sqrt(static_cast<Real>(n)));
  }
  return {a, a.adjoint("a^dag"), BasicOperatorMatrix<Real>::diagonal(numbers, "n")};
}

/// How the top of the bound basis is treated.
enum class Representation {
  /// dim = bound levels; A^dag|top> := 0 since |top+1> is not bound.
  Projected,
  /// One extra (ghost) level above the block so products that pass through
  /// |top+1> see the true f(top+1) before projection.
  Ghost,
};

struct OperatorOptions {
  Representation representation = Representation::Projected;
  /// Use only the lowest max_levels bound levels (deep traps).
  std::optional<std::size_t> max_levels;
};

template <std::floating_point Real>
struct BasicDeformedOps {
  BasicOperatorMatrix<Real> A;
  BasicOperatorMatrix<Real> A_dag;
  /// Number of physical (bound) levels in the block; equals dim unless Ghost.
  std::size_t physical_dim = 0;
};

using DeformedOps = BasicDeformedOps<double>;

template <std::floating_point Real>
std::size_t physical_block_dim(const BasicTrapParams<Real>& params, const OperatorOptions& options) {
  std::size_t dim = params.num_bound();
  if (options.max_levels) {
    if (*options.max_levels == 0) throw std::invalid_argument("operators: max_levels must be positive");
    dim = std::min(dim, *options.max_levels);
  }
  return dim;
}

/// A = a f(n), with A|n> = f(n) sqrt(n) |n-1>, and A^dag its transpose.
template <std::floating_point Real>
BasicDeformedOps<Real> build_deformed_ops(const BasicTrapParams<Real>& params,
                                          const OperatorOptions& options = {}) {
  const std::size_t physical = physical_block_dim(params, options);
  const std::size_t dim = options.representation == Representation::Ghost ? physical + 1 : physical;
  BasicOperatorMatrix<Real> A(dim, "A");
  for (std::size_t n = 1; n < dim; ++n) {
    A.set(n - 1, n, std::sqrt(static_cast<Real>(n) * f_squared(params, n)));
  }
  return {A, A.adjoint("A^dag"), physical};
}

/**
 * H = (A^dag A + A A^dag) / 2.
 *
 * Projected: the top diagonal entry lacks the (top+1) f^2(top+1) term and
 * sits below E_top (see hamiltonian_top_defect). Ghost: products are formed
 * with the ghost level present and the bound block is returned, so every
 * diagonal entry equals E_n.
 */
template <std::floating_point Real>
BasicOperatorMatrix<Real> hamiltonian(const BasicTrapParams<Real>& params,
                                      const OperatorOptions& options = {}) {
  const auto ops = build_deformed_ops(params, options);
  const auto sum = ops.A_dag * ops.A + ops.A * ops.A_dag;
  const auto half = std::complex<Real>(Real{1} / Real{2});
  return (half * sum).block(ops.physical_dim, "H");
}

/// E_top - H_projected(top, top): the energy lost by projecting A^dag|top>.
template <std::floating_point Real>
Real hamiltonian_top_defect(const BasicTrapParams<Real>& params) {
  const std::size_t top = params.top_level();
  const Real top_entry = hamiltonian(params)(top, top).real();
  return energy_deformed_form(params, top) - top_entry;
}

// ---------------------------------------------------------------------------
// Algebra checks
// ---------------------------------------------------------------------------

template <std::floating_point Real>
struct BasicAlgebraResidual {
  Real max_abs_residual{};  ///< max over per_index
  std::vector<std::pair<std::size_t, Real>> per_index;
  bool interior_only = true;
  /// Residual in the last row of the block, where projection truncates the identity.
  Real boundary_residual{};
  /// Max |entry| of the ladder relations ([n, A] + A, [n, A^dag] - A^dag, or
  /// their su(2) images), checked on the full block.
  Real ladder_relation_residual{};
};

using AlgebraResidual = BasicAlgebraResidual<double>;

namespace detail {

// Fills per-row residuals of `defect` for rows [0, interior_rows) and records
// the next row, if any, as the boundary.
template <std::floating_point Real>
void collect_rows(const BasicOperatorMatrix<Real>& defect, std::size_t interior_rows,
                  BasicAlgebraResidual<Real>& out) {
  for (std::size_t n = 0; n < interior_rows; ++n) {
    const Real r = defect.row_max_abs(n);
    out.per_index.emplace_back(n, r);
    out.max_abs_residual = std::max(out.max_abs_residual, r);
  }
  if (interior_rows < defect.dim()) out.boundary_residual = defect.row_max_abs(interior_rows);
}

template <std::floating_point Real>
std::vector<Real> level_numbers(std::size_t dim) {
  std::vector<Real> numbers(dim);
  for (std::size_t n = 0; n < dim; ++n) numbers[n] = static_cast<Real>(n);
  return numbers;
}

}  // namespace detail

/**
 * [A, A^dag] - (eta - (2n+1)/N) on interior rows n <= dim-2 of the projected
 * block, plus [n, A] + A and [n, A^dag] - A^dag on the full block.
 */
template <std::floating_point Real>
BasicAlgebraResidual<Real> check_deformed_commutator(const BasicTrapParams<Real>& params,
                                                     std::optional<std::size_t> max_levels = std::nullopt) {
  const auto ops = build_deformed_ops(params, {Representation::Projected, max_levels});
  const std::size_t dim = ops.physical_dim;
  const auto n_hat = BasicOperatorMatrix<Real>::diagonal(detail::level_numbers<Real>(dim), "n");

  std::vector<Real> expected(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    expected[n] = params.eta() - (Real{2} * static_cast<Real>(n) + Real{1}) * params.gamma();
  }
  const auto defect = commutator(ops.A, ops.A_dag) - BasicOperatorMatrix<Real>::diagonal(expected, "rhs");

  BasicAlgebraResidual<Real> out;
  detail::collect_rows(defect, dim - 1, out);
  out.ladder_relation_residual =
      std::max((commutator(n_hat, ops.A) + ops.A).max_abs_entry(),
               (commutator(n_hat, ops.A_dag) - ops.A_dag).max_abs_entry());
  return out;
}

/**
 * su(2) image of the deformed algebra: J+ = sqrt(N) A, J- = sqrt(N) A^dag,
 * J0 = s - n. Checks [J0, J+] = J+ and [J0, J-] = -J- on the full block and
 * [J+, J-] = 2 J0 on interior rows.
 */
template <std::floating_point Real>
BasicAlgebraResidual<Real> check_su2(const BasicTrapParams<Real>& params,
                                     std::optional<std::size_t> max_levels = std::nullopt) {
  const auto ops = build_deformed_ops(params, {Representation::Projected, max_levels});
  const std::size_t dim = ops.physical_dim;
  const std::complex<Real> scale(std::sqrt(params.depth_parameter()));
  const auto j_plus = (scale * ops.A).with_label("J+");
  const auto j_minus = (scale * ops.A_dag).with_label("J-");
  std::vector<Real> weights(dim);
  for (std::size_t n = 0; n < dim; ++n) weights[n] = params.s() - static_cast<Real>(n);
  const auto j_zero = BasicOperatorMatrix<Real>::diagonal(weights, "J0");

  const auto defect = commutator(j_plus, j_minus) - std::complex<Real>(2) * j_zero;
  BasicAlgebraResidual<Real> out;
  detail::collect_rows(defect, dim - 1, out);
  out.ladder_relation_residual =
      std::max((commutator(j_zero, j_plus) - j_plus).max_abs_entry(),
               (commutator(j_zero, j_minus) + j_minus).max_abs_entry());
  return out;
}

/// Default number of low-lying levels for the q-relation check: floor(N^(1/4)).
/// The n-dependent part of the residual, 2n^2/N^2, then stays below N^(-3/2),
/// well under the leading 1/N term.
template <std::floating_point Real>
std::size_t q_relation_window(const BasicTrapParams<Real>& params) {
  return static_cast<std::size_t>(std::floor(std::pow(params.depth_parameter(), Real{0.25})));
}

/**
 * A A^dag - q A^dag A - 1 with q = 1 - 2/N on the low-lying levels
 * n <= window. The relation only holds asymptotically; the residual is
 * (eta - 1) - 1/N + 2n(eta - 1)/N - 2n^2/N^2, i.e. about -1/N near the
 * bottom of the well.
 */
template <std::floating_point Real>
BasicAlgebraResidual<Real> q_relation_residual(const BasicTrapParams<Real>& params,
                                               std::optional<std::size_t> window = std::nullopt) {
  if (!(params.depth_parameter() > Real{2})) {
    throw std::domain_error("q_relation_residual: requires N > 2 so that q = 1 - 2/N > 0");
  }
  const std::size_t levels = window.value_or(q_relation_window(params));
  const auto ops = build_deformed_ops(params, {Representation::Projected, levels + 2});
  const std::size_t dim = ops.physical_dim;
  const std::complex<Real> q(Real{1} - Real{2} * params.gamma());
  const auto defect =
      ops.A * ops.A_dag - q * (ops.A_dag * ops.A) - BasicOperatorMatrix<Real>::identity(dim);
  BasicAlgebraResidual<Real> out;
  detail::collect_rows(defect, dim - 1, out);
  return out;
}

/// Least-squares slope of log(y) against log(x).
template <std::floating_point Real>
Real loglog_slope(std::span<const Real> xs, std::span<const Real> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two matched points");
  }
  Real mx{}, my{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<Real>(xs.size());
  my /= static_cast<Real>(xs.size());
  Real sxy{}, sxx{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Real dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

template <std::floating_point Real>
struct BasicQScaling {
  std::vector<Real> depth_parameters;
  std::vector<Real> max_residuals;
  Real slope{};
};

/// q-relation residual across a grid of N and its log-log slope (expected -1).
template <std::floating_point Real>
BasicQScaling<Real> q_relation_scaling(std::span<const Real> depth_parameters) {
  BasicQScaling<Real> out;
  for (const Real N : depth_parameters) {
    out.depth_parameters.push_back(N);
    out.max_residuals.push_back(q_relation_residual(new_trap(N)).max_abs_residual);
  }
  out.slope = loglog_slope<Real>(out.depth_parameters, out.max_residuals);
  return out;
}

}  // namespace mpt
