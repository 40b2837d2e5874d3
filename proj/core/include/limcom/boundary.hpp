#pragma once

#include <algorithm>
#include <cmath>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "limcom/model.hpp"

namespace limcom {

/// Discretization of the time integrals in the boundary equation.
enum class BoundaryRule {
  /// Gauss-Legendre on each grid interval in the variable sqrt(s - t), with
  /// the boundary interpolated log-linearly inside the interval. Second order.
  GaussSqrt,
  /// Composite trapezoid on the grid nodes. Order 3/2.
  Trapezoid,
};

struct BoundaryOptions {
  BoundaryRule rule = BoundaryRule::GaussSqrt;
  int gauss_points = 4;
  /// Bisection stops once the bracket is narrower than this.
  double bracket_width = 1e-12;
  /// Extrapolate from grids n and 2n.
  bool richardson = false;
};

/// Free boundary z*(t) on a uniform time grid t_0 = 0 < ... < t_N = T.
struct BoundaryGrid {
  std::vector<double> times;
  std::vector<double> values;
  /// Integral-equation residual at each node (zero at the terminal node).
  std::vector<double> residuals;
  DerivedConstants consts;
  BoundaryOptions options;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  double step() const noexcept { return consts.params.T / static_cast<double>(steps()); }
  double max_residual() const noexcept;
};

BoundaryGrid solve_boundary(const DerivedConstants& consts, int n_steps,
                            const BoundaryOptions& options = {});

/// Residual of the boundary integral equation at node i for a trial value,
/// using the grid's values at the later nodes and the grid's rule.
double boundary_residual(const BoundaryGrid& grid, std::size_t i, double candidate);

/// Log-linear interpolation of the boundary; exact at nodes.
double boundary_at(const BoundaryGrid& grid, double t);

/// Position of t inside [t0, t1] measured in sqrt(T - t), the variable in
/// which log z* is interpolated linearly. Near maturity the boundary behaves
/// like 1 - c sqrt(T - t), which this reproduces on the last interval.
inline double interpolation_fraction(double T, double t0, double t1, double t) {
  const double a = std::sqrt(T - t0), b = std::sqrt(std::max(T - t1, 0.0));
  const double f = (a - std::sqrt(std::max(T - t, 0.0))) / (a - b);
  return std::clamp(f, 0.0, 1.0);
}

/// CSV with header `t,z_star`, one row per node, 15 significant digits.
/// A non-empty comment is written first as a `# ` line.
void write_boundary_csv(const BoundaryGrid& grid, std::ostream& out, const std::string& comment = {});

}  // namespace limcom
