#include "limcom/vi_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "limcom/error.hpp"

namespace limcom {
namespace {

struct Stencil {
  double lower;   // coefficient of Q_{j-1} in L
  double centre;  // coefficient of Q_j
  double upper;   // coefficient of Q_{j+1}
};

Stencil make_stencil(const DerivedConstants& c, double dz) {
  const double v = c.vol();
  const double diff = 0.5 * v * v / (dz * dz);
  const double conv = (c.r_hat - c.rho_hat + 0.5 * v * v) / (2.0 * dz);
  return {diff - conv, -2.0 * diff - c.rho_hat, diff + conv};
}

double source(const DerivedConstants& c, double zeta) {
  return std::expm1(c.power() * zeta) / (1.0 - c.params.gamma);
}

// Solution of the PDE without the obstacle: minus the stopping payoff.
double far_field(const DerivedConstants& c, double t, double zeta) {
  const double tau = c.params.T - t;
  const double ann_rho = -std::expm1(-c.rho_hat * tau) / c.rho_hat;
  const double ann_K = -std::expm1(-c.K * tau) / c.K;
  return -(ann_rho - ann_K * std::exp(c.power() * zeta)) / (1.0 - c.params.gamma);
}

// Right-hand side and matrix of the step from node k + 1 to node k. The
// Dirichlet values at both ends enter through the solution vector.
struct StepSystem {
  std::vector<double> rhs;
  double diag, off_lower, off_upper;
};

StepSystem build_step(const DerivedConstants& c, const Stencil& st, const std::vector<double>& zeta,
                      const double* next, double dt, double theta) {
  const std::size_t m = zeta.size() - 1;
  StepSystem sys;
  sys.rhs.assign(m + 1, 0.0);
  sys.diag = 1.0 - theta * dt * st.centre;
  sys.off_lower = -theta * dt * st.lower;
  sys.off_upper = -theta * dt * st.upper;
  for (std::size_t j = 1; j < m; ++j) {
    const double lq = st.lower * next[j - 1] + st.centre * next[j] + st.upper * next[j + 1];
    sys.rhs[j] = next[j] + (1.0 - theta) * dt * lq + dt * source(c, zeta[j]);
  }
  return sys;
}

}  // namespace

FDOptions FDOptions::defaults_for(const DerivedConstants& consts) {
  FDOptions o;
  o.zeta_min = std::log(consts.z_inf) - 1.5;
  return o;
}

FDSolution solve_vi_fd(const DerivedConstants& c, const FDOptions& opt) {
  if (!(opt.zeta_min < std::log(c.z_inf) - 1.0)) {
    throw Error(ErrorCode::DOMAIN_ERROR, "zeta_min must lie below log z_inf - 1");
  }
  if (!(opt.zeta_max > 3.0)) throw Error(ErrorCode::DOMAIN_ERROR, "zeta_max must exceed 3");
  if (opt.n_time < 50 || opt.n_space < 50) throw Error(ErrorCode::DOMAIN_ERROR, "FD grid needs >= 50 steps");
  if (!(opt.theta >= 0.5 && opt.theta <= 1.0)) throw Error(ErrorCode::DOMAIN_ERROR, "theta must be in [0.5, 1]");
  if (!(opt.omega >= 1.0 && opt.omega < 2.0)) throw Error(ErrorCode::DOMAIN_ERROR, "omega must be in [1, 2)");

  const auto nt = static_cast<std::size_t>(opt.n_time);
  const auto m = static_cast<std::size_t>(opt.n_space);
  FDSolution sol;
  sol.consts = c;
  sol.options = opt;
  sol.times.resize(nt + 1);
  sol.zeta.resize(m + 1);
  const double dt = c.params.T / opt.n_time;
  const double dz = (opt.zeta_max - opt.zeta_min) / opt.n_space;
  for (std::size_t k = 0; k <= nt; ++k) sol.times[k] = k == nt ? c.params.T : dt * static_cast<double>(k);
  for (std::size_t j = 0; j <= m; ++j) sol.zeta[j] = opt.zeta_min + dz * static_cast<double>(j);
  sol.q.assign((nt + 1) * (m + 1), 0.0);
  sol.step_theta.assign(nt, opt.theta);
  sol.iterations.assign(nt, 0);

  const Stencil st = make_stencil(c, dz);
  double omega = opt.omega;
  for (std::size_t step = 0; step < nt; ++step) {
    const std::size_t k = nt - 1 - step;
    const double theta = static_cast<int>(step) < opt.rannacher_steps ? 1.0 : opt.theta;
    sol.step_theta[k] = theta;
    const double* next = &sol.q[(k + 1) * (m + 1)];
    double* cur = &sol.q[k * (m + 1)];
    const double q_top = far_field(c, sol.times[k], sol.zeta[m]);
    const StepSystem sys = build_step(c, st, sol.zeta, next, dt, theta);

    for (;;) {
      // Warm start from the later slice.
      for (std::size_t j = 0; j <= m; ++j) cur[j] = next[j];
      cur[0] = 0.0;
      cur[m] = q_top;
      bool converged = false, diverged = false;
      int it = 0;
      for (; it < opt.max_iterations; ++it) {
        double change = 0.0;
        for (std::size_t j = 1; j < m; ++j) {
          const double gs = (sys.rhs[j] - sys.off_lower * cur[j - 1] - sys.off_upper * cur[j + 1]) / sys.diag;
          const double updated = std::max(0.0, cur[j] + omega * (gs - cur[j]));
          change = std::max(change, std::abs(updated - cur[j]));
          cur[j] = updated;
        }
        if (!std::isfinite(change) || change > 1e12) {
          diverged = true;
          break;
        }
        if (change < opt.tolerance) {
          converged = true;
          break;
        }
      }
      if (converged) {
        sol.iterations[k] = it + 1;
        break;
      }
      if (diverged && omega > 1.0) {
        omega = 1.0 + 0.5 * (omega - 1.0);
        if (omega - 1.0 < 1e-3) omega = 1.0;
        continue;
      }
      std::ostringstream os;
      os << "PSOR stalled at t=" << sol.times[k] << " after " << it << " sweeps (omega=" << omega << ")";
      throw Error(ErrorCode::PSOR_NOT_CONVERGED, os.str());
    }
  }
  sol.omega_used = omega;
  return sol;
}

std::vector<double> fd_boundary(const FDSolution& sol) {
  const std::size_t nt = sol.times.size() - 1;
  const std::size_t m = sol.zeta.size() - 1;
  const double threshold = 10.0 * sol.options.tolerance;
  std::vector<double> out(nt + 1, sol.consts.z_T);
  for (std::size_t k = 0; k < nt; ++k) {
    double z = std::exp(sol.zeta[m]);
    for (std::size_t j = 0; j <= m; ++j) {
      if (sol.at(k, j) > threshold) {
        z = std::exp(sol.zeta[j]);
        break;
      }
    }
    out[k] = z;
  }
  for (std::size_t step = 1; step <= nt; ++step) {
    const std::size_t k = nt - step;
    out[k] = std::min(out[k], out[k + 1]);
  }
  return out;
}

ComplementarityReport complementarity_report(const FDSolution& sol) {
  const auto& c = sol.consts;
  const std::size_t nt = sol.times.size() - 1;
  const std::size_t m = sol.zeta.size() - 1;
  const Stencil st = make_stencil(c, sol.d_space());
  const double dt = sol.d_time();

  ComplementarityReport rep;
  rep.min_stopped_residual = std::numeric_limits<double>::infinity();
  std::vector<double> min_form;
  min_form.reserve(nt * (m - 1));
  for (std::size_t k = 0; k < nt; ++k) {
    const double* cur = &sol.q[k * (m + 1)];
    const double* next = &sol.q[(k + 1) * (m + 1)];
    const StepSystem sys = build_step(c, st, sol.zeta, next, dt, sol.step_theta[k]);
    for (std::size_t j = 1; j < m; ++j) {
      const double lhs = sys.diag * cur[j] + sys.off_lower * cur[j - 1] + sys.off_upper * cur[j + 1];
      const double residual = (lhs - sys.rhs[j]) / sys.diag;
      const double mf = std::abs(std::min(residual, cur[j]));
      min_form.push_back(mf);
      rep.max_min_form = std::max(rep.max_min_form, mf);
      ++rep.nodes;
      if (cur[j] > 0.0) {
        ++rep.continuation_nodes;
        rep.max_continuation_residual = std::max(rep.max_continuation_residual, std::abs(residual));
      } else {
        ++rep.stopped_nodes;
        rep.min_stopped_residual = std::min(rep.min_stopped_residual, residual);
      }
    }
  }
  if (rep.stopped_nodes == 0) rep.min_stopped_residual = 0.0;
  if (!min_form.empty()) {
    std::sort(min_form.begin(), min_form.end());
    auto q = [&](double p) {
      const auto idx = static_cast<std::size_t>(p * static_cast<double>(min_form.size() - 1));
      return min_form[idx];
    };
    rep.quantile_50 = q(0.5);
    rep.quantile_90 = q(0.9);
    rep.quantile_99 = q(0.99);
  }
  return rep;
}

void write_fd_csv(const FDSolution& sol, std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,zeta,Q_hat\n" << std::setprecision(15);
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    for (std::size_t j = 0; j < sol.zeta.size(); ++j) {
      out << sol.times[k] << ',' << sol.zeta[j] << ',' << sol.at(k, j) << '\n';
    }
  }
}

void write_fd_boundary_csv(const FDSolution& sol, const std::vector<double>& boundary, std::ostream& out,
                           const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,z_fd\n" << std::setprecision(15);
  for (std::size_t k = 0; k < sol.times.size() && k < boundary.size(); ++k) {
    out << sol.times[k] << ',' << boundary[k] << '\n';
  }
}

}  // namespace limcom
