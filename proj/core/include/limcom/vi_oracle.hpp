#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "limcom/model.hpp"

namespace limcom {

// Finite-difference solver for the zero-obstacle variational inequality of
// the early-exercise premium in zeta = log z:
//
//   min( -dQ/dt - L Q - f, Q ) = 0,   Q(T, .) = 0,
//   L = (gamma sigma)^2/2 d2/dzeta2 + (r_hat - rho_hat + (gamma sigma)^2/2) d/dzeta - rho_hat,
//   f = (e^{zeta (1/gamma - 1)} - 1) / (1 - gamma).
//
// It shares no code with the integral-equation path and serves as its
// independent cross-check.

struct FDOptions {
  double zeta_min = -2.5;  // defaults_for() places it 1.5 below log z_inf
  double zeta_max = 4.0;
  int n_time = 400;
  int n_space = 400;
  double theta = 0.5;
  int rannacher_steps = 2;  // fully implicit steps next to maturity
  double omega = 1.2;       // PSOR relaxation, halved towards 1 on divergence
  double tolerance = 1e-10;
  int max_iterations = 200000;

  static FDOptions defaults_for(const DerivedConstants& consts);
};

struct FDSolution {
  DerivedConstants consts;
  FDOptions options;
  std::vector<double> times;  // n_time + 1
  std::vector<double> zeta;   // n_space + 1
  std::vector<double> q;      // row-major by time node
  std::vector<double> step_theta;  // theta used from node k + 1 to node k
  std::vector<int> iterations;     // PSOR sweeps per step
  double omega_used = 0.0;

  double d_time() const noexcept { return times[1] - times[0]; }
  double d_space() const noexcept { return zeta[1] - zeta[0]; }
  double at(std::size_t k, std::size_t j) const noexcept { return q[k * zeta.size() + j]; }
};

FDSolution solve_vi_fd(const DerivedConstants& consts, const FDOptions& options);

/// Per time node: exp of the smallest grid zeta with Q > 10 x tolerance, then
/// made non-decreasing in t. The terminal node, where Q vanishes, reports
/// z^T = 1.
std::vector<double> fd_boundary(const FDSolution& sol);

struct ComplementarityReport {
  std::size_t nodes = 0;
  std::size_t continuation_nodes = 0;
  std::size_t stopped_nodes = 0;
  double max_min_form = 0.0;            // max |min(residual, Q)|
  double max_continuation_residual = 0.0;  // max |residual| where Q > 0
  double min_stopped_residual = 0.0;    // min residual where Q = 0
  double quantile_50 = 0.0;             // of |min(residual, Q)|
  double quantile_90 = 0.0;
  double quantile_99 = 0.0;
};

/// Residuals of the theta-scheme LCP at interior nodes, scaled by the
/// diagonal of the system matrix so they compare with the PSOR tolerance.
ComplementarityReport complementarity_report(const FDSolution& sol);

void write_fd_csv(const FDSolution& sol, std::ostream& out, const std::string& comment = {});
void write_fd_boundary_csv(const FDSolution& sol, const std::vector<double>& boundary, std::ostream& out,
                           const std::string& comment = {});

}  // namespace limcom
