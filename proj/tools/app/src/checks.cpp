#include "limcom_app/checks.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "limcom/contract.hpp"
#include "limcom/error.hpp"
#include "limcom/normal.hpp"
#include "limcom/valuation.hpp"
#include "limcom/vi_oracle.hpp"

namespace limcom::app {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ValuationContext make_context(const RunConfig& cfg, const DerivedConstants& c, int steps) {
  return ValuationContext(solve_boundary(c, steps, cfg.boundary_options()), cfg.quad_tol, cfg.tail_tol);
}

// Result shell: time limit and tolerance set, pass decided by finish().
CheckResult start(int criterion, std::string name, double tolerance, double time_limit = 0.0) {
  CheckResult r;
  r.criterion = criterion;
  r.name = std::move(name);
  r.tolerance = tolerance;
  r.time_limit = time_limit;
  return r;
}

void finish(CheckResult& r, bool ok, Clock::time_point t0) {
  r.seconds = seconds_since(t0);
  r.passed = ok && (r.time_limit <= 0.0 || r.seconds <= r.time_limit);
  if (ok && !r.passed) {
    std::ostringstream os;
    os << "over time limit (" << r.seconds << " s > " << r.time_limit << " s)";
    r.detail = r.detail.empty() ? os.str() : r.detail + "; " + os.str();
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
  return s;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

CheckResult check_boundary_structure(const RunConfig& cfg) {
  auto r = start(1, "boundary structure", 1e-9, 10.0);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto grid = solve_boundary(c, cfg.boundary_steps, cfg.boundary_options());
  const auto& v = grid.values;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) {
      problems.push_back("not strictly increasing at node " + std::to_string(i));
      break;
    }
  }
  if (v.back() != 1.0) problems.push_back("terminal value " + num(v.back()) + " != 1");
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] > c.z_inf && v[i] < 1.0)) {
      problems.push_back("node " + std::to_string(i) + " outside (z_inf, 1)");
      break;
    }
  }
  r.measured = grid.max_residual();
  if (!(r.measured <= r.tolerance)) problems.push_back("max residual " + num(r.measured));
  r.detail = "z*(0)=" + num(v.front()) + (problems.empty() ? "" : "; " + join(problems));
  finish(r, problems.empty(), t0);
  return r;
}

CheckResult check_boundary_value_matching(const RunConfig& cfg) {
  // Between-node residual of the continuous boundary equation; catches grids
  // too coarse for the interpolated boundary to be trusted.
  auto r = start(0, "boundary value matching", 1e-4);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  const auto& times = ctx.grid().times;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    worst = std::max(worst, std::abs(value_matching_residual(ctx, 0.5 * (times[i] + times[i + 1]))));
  }
  r.measured = worst;
  finish(r, worst <= r.tolerance, t0);
  return r;
}

CheckResult check_infinite_horizon(const RunConfig& cfg, const SuiteOptions& opt) {
  auto r = start(2, "infinite-horizon limit", 1e-3, 60.0);
  const auto t0 = Clock::now();
  RunConfig long_cfg = cfg;
  long_cfg.params.T = opt.long_horizon;
  const auto c = validate(long_cfg);
  const auto ctx = make_context(long_cfg, c, opt.long_horizon_steps);
  const double gap = std::abs(ctx.grid().values.front() - c.z_inf);
  const double lo = std::max(0.46, 1.056 * c.z_inf), hi = std::max(5.0, 2.0 * lo);
  double worst = 0.0, worst_z = lo;
  const int n = 40;
  for (int i = 0; i <= n; ++i) {
    const double z = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    const double e = rel_err(premium_Q(ctx, 0.0, z), premium_Q_infinity(z, c));
    if (e > worst) worst = e, worst_z = z;
  }
  r.measured = std::max(gap, worst);
  r.detail = "|z*(0)-z_inf|=" + num(gap) + "; max rel err Q vs Q_inf=" + num(worst) + " at z=" + num(worst_z);
  finish(r, gap <= 1e-3 && worst <= 1e-3, t0);
  return r;
}

CheckResult check_laplace_identity() {
  auto r = start(3, "Laplace identity", 1e-8, 1.0);
  const auto t0 = Clock::now();
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst = 0.0;
  for (double cc : {0.01, 0.04, 0.1, 0.5, 2.0}) {
    for (double d : {-3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0}) {
      // xi = tau^2 keeps the integrand smooth at the origin.
      auto f = [&](double tau) { return 2.0 * tau * std::exp(-cc * tau * tau) * 0.5 * std::erfc(-d * tau / std::sqrt(2.0)); };
      const double oracle = integrator.integrate(f, 1e-14);
      worst = std::max(worst, rel_err(laplace_normal_integral(cc, d), oracle));
    }
  }
  r.measured = worst;
  finish(r, worst <= r.tolerance, t0);
  return r;
}

CheckResult check_duality_gradient(const RunConfig& cfg, const SuiteOptions& opt) {
  auto r = start(4, "duality gradient", 1e-4, 60.0);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  const double g = c.params.gamma;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ut(0.0, 0.8 * c.params.T), uy(-0.5, 0.5), uz(0.05, 2.0);
  double worst = 0.0;
  for (int i = 0; i < opt.gradient_points; ++i) {
    const double t = ut(rng), y = std::exp(uy(rng));
    const double lambda = ctx.boundary(t) * std::exp(uz(rng)) * std::pow(y, g);
    const double h = 1e-4 * lambda;
    const double fd = (dual_J(ctx, t, lambda + h, y) - dual_J(ctx, t, lambda - h, y)) / (2 * h);
    worst = std::max(worst, rel_err(marginal_dual(ctx, t, lambda, y), fd));
  }
  r.measured = worst;
  finish(r, worst <= r.tolerance, t0);
  return r;
}

CheckResult check_fd_oracle(const RunConfig& cfg) {
  auto r = start(5, "integral vs finite-difference oracle", 1e-2, 120.0);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  auto fo = FDOptions::defaults_for(c);
  fo.n_time = cfg.fd_time_steps;
  fo.n_space = cfg.fd_space_steps;
  const auto fd = solve_vi_fd(c, fo);
  const std::size_t nt = fd.times.size() - 1, m = fd.zeta.size() - 1;

  double max_q = 0.0;
  for (double q : fd.q) max_q = std::max(max_q, q);
  double worst = 0.0;
  const std::size_t kstride = std::max<std::size_t>(1, nt / 100);
  for (std::size_t k = 0; k < nt; k += kstride) {
    for (std::size_t j = 1; j < m; ++j) {
      worst = std::max(worst, std::abs(premium_Q(ctx, fd.times[k], std::exp(fd.zeta[j])) - fd.at(k, j)));
    }
  }
  const auto bd = fd_boundary(fd);
  double worst_steps = 0.0;
  for (std::size_t k = 0; k <= nt; ++k) {
    const double d = std::abs(std::log(bd[k]) - std::log(ctx.boundary(fd.times[k]))) / fd.d_space();
    worst_steps = std::max(worst_steps, d);
  }
  r.measured = worst / max_q;
  r.detail = "max |Q - Q_fd| / max Q_fd=" + num(r.measured) + "; boundary gap " + num(worst_steps) + " space steps";
  finish(r, r.measured <= r.tolerance && worst_steps <= 2.0, t0);
  return r;
}

CheckResult check_monte_carlo(const RunConfig& cfg, const SuiteOptions& opt) {
  auto r = start(6, "Monte Carlo duality", 0.0, 120.0);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  const double w = c.params.w0, y0 = c.params.y0;
  const double lambda = solve_lambda_star(ctx, 0.0, y0, w);
  const double principal_target = dual_J(ctx, 0.0, lambda, y0) - lambda * w;
  const auto mc = monte_carlo_check(ctx, lambda, opt.mc_paths, opt.mc_steps, cfg.seed);
  const double agent_band = 3 * mc.agent_se + mc.agent_bias();
  const double principal_band = 3 * mc.principal_se + mc.principal_bias();
  const double agent_gap = std::abs(mc.agent - w), principal_gap = std::abs(mc.principal - principal_target);
  r.measured = std::max(agent_gap / agent_band, principal_gap / principal_band);
  r.tolerance = 1.0;
  r.detail = "agent " + num(mc.agent) + " vs " + num(w) + " (band " + num(agent_band) + "); principal " +
             num(mc.principal) + " vs " + num(principal_target) + " (band " + num(principal_band) +
             "); measured = gap / band";
  finish(r, agent_gap <= agent_band && principal_gap <= principal_band, t0);
  return r;
}

CheckResult check_path_invariants(const RunConfig& cfg, const SuiteOptions& opt) {
  auto r = start(7, "path invariants", 1e-5);
  const auto t0 = Clock::now();
  std::vector<std::string> problems;
  double worst = 0.0;

  {
    const auto c = validate(cfg);
    const auto ctx = make_context(cfg, c, cfg.boundary_steps);
    const double lambda = solve_lambda_star(ctx, 0.0, c.params.y0, c.params.w0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < opt.invariant_paths; ++i) {
      const auto path = run_contract(ctx, simulate_income(c.params, opt.invariant_steps, cfg.seed, i), lambda);
      const auto& nodes = path.nodes;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        if (k > 0 && n.costate < nodes[k - 1].costate) problems.push_back("X* decreased on path " + std::to_string(i));
        if (n.t >= c.params.T) continue;
        worst = std::max(worst, n.autarky - n.promised);
        if (n.jr_hit) {
          ++hits;
          // Approach the boundary from the no-jump side.
          const double inside = marginal_dual(ctx, n.t, n.multiplier * (1.0 + 1e-9), n.income);
          worst = std::max(worst, std::abs(inside - n.autarky));
        }
      }
      if (problems.size() > 5) break;
    }
    r.detail = std::to_string(hits) + " hit nodes";
  }

  auto consumption_check = [&](double rho, const char* label) {
    RunConfig v = cfg;
    v.params.rho = rho;
    const auto c = validate(v);
    const auto ctx = make_context(v, c, v.boundary_steps);
    const double lambda = solve_lambda_star(ctx, 0.0, c.params.y0, c.params.w0);
    const double expected = -(c.params.rho - c.params.r) / c.params.gamma;
    double slope_err = 0.0;
    ContractOptions co;
    co.promised_values = false;
    for (std::size_t i = 0; i < opt.invariant_paths; ++i) {
      const auto path = run_contract(ctx, simulate_income(c.params, opt.invariant_steps, cfg.seed, i), lambda, 0.0, co);
      const auto& nodes = path.nodes;
      for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (nodes[k].jr_hit) continue;
        const double slope = (std::log(nodes[k].consumption) - std::log(nodes[k - 1].consumption)) /
                             (nodes[k].t - nodes[k - 1].t);
        slope_err = std::max(slope_err, std::abs(slope - expected));
        if (rho == c.params.r && nodes[k].consumption < nodes[k - 1].consumption) {
          problems.push_back(std::string(label) + ": C* decreased on path " + std::to_string(i));
          break;
        }
      }
    }
    if (slope_err > 1e-6) problems.push_back(std::string(label) + ": log C* slope off by " + num(slope_err));
    return slope_err;
  };
  const double r_slope = consumption_check(cfg.params.r, "rho=r");
  const double hi_slope = consumption_check(cfg.params.r + 0.03, "rho=r+0.03");

  r.measured = worst;
  if (worst > r.tolerance) problems.push_back("promised-value gap " + num(worst));
  r.detail += "; slope err " + num(std::max(r_slope, hi_slope));
  if (!problems.empty()) r.detail += "; " + join(problems);
  finish(r, problems.empty(), t0);
  return r;
}

CheckResult check_first_best(const RunConfig& cfg) {
  auto r = start(8, "first-best benchmark", 1e-8);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto& p = c.params;
  std::vector<std::string> problems;
  const double c0 = first_best_consumption(c, 0.0, 0.0, p.w0);
  if (p == ModelParams{} && std::abs(c0 - 1.321750) > 1e-5) problems.push_back("C_FB(0)=" + num(c0));
  auto f = [&](double s) { return std::exp(-p.rho * s) * utility(first_best_consumption(c, 0.0, s, p.w0), p.gamma); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, p.T, 10, 1e-14);
  r.measured = std::abs(value - p.w0);
  if (r.measured > r.tolerance) problems.push_back("utility integral off by " + num(r.measured));
  double prev = c0;
  for (int i = 1; i <= 300; ++i) {
    const double cs = first_best_consumption(c, 0.0, p.T * i / 300.0, p.w0);
    if (cs > prev * (1 + 1e-15)) {
      problems.push_back("C_FB increases");
      break;
    }
    prev = cs;
  }
  r.detail = "C_FB(0)=" + num(c0) + (problems.empty() ? "" : "; " + join(problems));
  finish(r, problems.empty(), t0);
  return r;
}

CheckResult check_homogeneity(const RunConfig& cfg) {
  auto r = start(9, "homogeneity", 1e-8);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  const double g = c.params.gamma, w = c.params.w0;
  const double lambda = solve_lambda_star(ctx, 0.0, 1.0, w);
  const double J1 = dual_J(ctx, 0.0, lambda, 1.0);
  double worst = 0.0;
  for (double k : {0.5, 2.0}) {
    const double kg = std::pow(k, g);
    worst = std::max(worst, rel_err(dual_J(ctx, 0.0, kg * lambda, k), k * J1));
    worst = std::max(worst, rel_err(solve_lambda_star(ctx, 0.0, k, std::pow(k, 1.0 - g) * w), kg * lambda));
  }
  r.measured = worst;
  finish(r, worst <= r.tolerance, t0);
  return r;
}

CheckResult check_hjb(const RunConfig& cfg, const SuiteOptions& opt) {
  auto r = start(10, "HJB pointwise", 5e-3);
  const auto t0 = Clock::now();
  const auto c = validate(cfg);
  const auto ctx = make_context(cfg, c, cfg.boundary_steps);
  const double g = c.params.gamma;
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> ut(0.05 * c.params.T, 0.8 * c.params.T), uy(-0.5, 0.5);
  std::uniform_real_distribution<double> unr(0.1, 1.5), ujr(0.05, 1.0);
  double worst_pde = 0.0, worst_grad = 0.0;
  int skipped = 0;
  for (bool jr : {false, true}) {
    for (int done = 0; done < opt.hjb_points;) {
      const double t = ut(rng), y = std::exp(uy(rng));
      const double z = ctx.boundary(t) * std::exp(jr ? -ujr(rng) : unr(rng));
      try {
        const auto h = hjb_residual(ctx, t, z * std::pow(y, g), y);
        if (jr) worst_grad = std::max(worst_grad, std::abs(h.gradient));
        else worst_pde = std::max(worst_pde, std::abs(h.pde) / h.scale);
        ++done;
      } catch (const Error& e) {
        if (!e.has(ErrorCode::STENCIL_ACROSS_BOUNDARY) || ++skipped > 100) throw;
      }
    }
  }
  r.measured = worst_pde;
  r.detail = "scaled PDE residual " + num(worst_pde) + "; jump-region |J_lambda - U_d| " + num(worst_grad);
  finish(r, worst_pde <= 5e-3 && worst_grad <= 1e-6, t0);
  return r;
}

std::vector<CheckResult> run_suite(const RunConfig& cfg, const SuiteOptions& opt,
                                   const std::function<void(const CheckResult&)>& on_result) {
  using Fn = std::function<CheckResult()>;
  const std::vector<std::pair<std::pair<int, std::string>, Fn>> checks = {
      {{1, "boundary structure"}, [&] { return check_boundary_structure(cfg); }},
      {{2, "infinite-horizon limit"}, [&] { return check_infinite_horizon(cfg, opt); }},
      {{3, "Laplace identity"}, [] { return check_laplace_identity(); }},
      {{4, "duality gradient"}, [&] { return check_duality_gradient(cfg, opt); }},
      {{5, "integral vs finite-difference oracle"}, [&] { return check_fd_oracle(cfg); }},
      {{6, "Monte Carlo duality"}, [&] { return check_monte_carlo(cfg, opt); }},
      {{7, "path invariants"}, [&] { return check_path_invariants(cfg, opt); }},
      {{8, "first-best benchmark"}, [&] { return check_first_best(cfg); }},
      {{9, "homogeneity"}, [&] { return check_homogeneity(cfg); }},
      {{10, "HJB pointwise"}, [&] { return check_hjb(cfg, opt); }},
      {{0, "boundary value matching"}, [&] { return check_boundary_value_matching(cfg); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [id, fn] : checks) {
    CheckResult res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.criterion = id.first;
      res.name = id.second;
      res.passed = false;
      res.measured = std::nan("");
      res.detail = e.what();
    }
    if (on_result) on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

std::string format_line(const CheckResult& r) {
  char head[96];
  if (r.criterion > 0) std::snprintf(head, sizeof head, "criterion %2d", r.criterion);
  else std::snprintf(head, sizeof head, "extra       ");
  std::ostringstream os;
  os << (r.passed ? "PASS " : "FAIL ") << head << "  " << r.name << ": measured " << num(r.measured)
     << " (tol " << num(r.tolerance) << ", " << num(r.seconds) << " s)";
  if (!r.detail.empty()) os << "  [" << r.detail << "]";
  return os.str();
}

}  // namespace limcom::app
