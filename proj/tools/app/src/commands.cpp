#include "limcom_app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

#include "limcom/contract.hpp"
#include "limcom/error.hpp"
#include "limcom/valuation.hpp"

namespace limcom::app {
namespace {

using nlohmann::json;

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  const auto path = cfg.out_dir / name;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot write " + path.string());
  return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
  auto out = open_out(cfg, name);
  out << j.dump(2) << '\n';
}

json config_json(const RunConfig& cfg) {
  return {{"config_hash", cfg.hash()}, {"config", cfg.canonical()}};
}

ValuationContext solve(const RunConfig& cfg, const DerivedConstants& c) {
  return ValuationContext(solve_boundary(c, cfg.boundary_steps, cfg.boundary_options()), cfg.quad_tol,
                          cfg.tail_tol);
}

}  // namespace

std::string exact(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x || std::isnan(x)) break;
  }
  return buf;
}

int cmd_boundary(const RunConfig& cfg, std::ostream& log) {
  const auto c = validate(cfg);
  const auto grid = solve_boundary(c, cfg.boundary_steps, cfg.boundary_options());
  auto out = open_out(cfg, "boundary.csv");
  write_boundary_csv(grid, out, cfg.comment());
  log << std::setprecision(10) << "z*(0) = " << grid.values.front() << "\nz_inf = " << c.z_inf
      << "\nmax residual = " << std::setprecision(3) << grid.max_residual() << '\n';
  return kSuccess;
}

int cmd_value(const RunConfig& cfg, std::ostream& log) {
  const auto c = validate(cfg);
  const auto& p = c.params;
  check_promised_value(c, 0.0, p.y0, p.w0);
  const auto ctx = solve(cfg, c);

  std::vector<double> times, ratios;
  for (double f : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99}) times.push_back(f * p.T);
  const double lo = 0.8 * c.z_inf, hi = 10.0;
  for (int i = 0; i <= 80; ++i) ratios.push_back(lo * std::pow(hi / lo, i / 80.0));
  auto out = open_out(cfg, "value_surface.csv");
  write_value_surface(ctx, times, ratios, out, cfg.comment());

  const double lambda = solve_lambda_star(ctx, 0.0, p.y0, p.w0);
  const double J = dual_J(ctx, 0.0, lambda, p.y0);
  json j = config_json(cfg);
  j["z_star_0"] = exact(ctx.grid().values.front());
  j["z_inf"] = exact(c.z_inf);
  j["lambda_star"] = exact(lambda);
  j["J"] = exact(J);
  j["principal_value"] = exact(J - lambda * p.w0);
  write_json(cfg, "value.json", j);
  log << std::setprecision(10) << "lambda* = " << lambda << "\nJ(0, lambda*, y0) = " << J
      << "\nprincipal value = " << J - lambda * p.w0 << '\n';
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const auto c = validate(cfg);
  const auto& p = c.params;
  check_promised_value(c, 0.0, p.y0, p.w0);
  if (cfg.sim_steps % 2 != 0) throw Error(ErrorCode::CONFIG_ERROR, "sim_steps must be even");
  const auto ctx = solve(cfg, c);
  const double lambda = solve_lambda_star(ctx, 0.0, p.y0, p.w0);
  const double J = dual_J(ctx, 0.0, lambda, p.y0);

  for (std::size_t i = 0; i < cfg.csv_paths; ++i) {
    const auto path = run_contract(ctx, simulate_income(p, cfg.sim_steps, cfg.seed, i), lambda);
    auto out = open_out(cfg, "contract_path_" + std::to_string(i) + ".csv");
    write_contract_csv(path, out, cfg.comment());
  }
  const auto mc = monte_carlo_check(ctx, lambda, cfg.paths, cfg.sim_steps, cfg.seed);

  json j = config_json(cfg);
  j["lambda_star"] = exact(lambda);
  j["J"] = exact(J);
  j["principal_value"] = exact(J - lambda * p.w0);
  j["monte_carlo"] = {{"paths", mc.n_paths},
                      {"steps", mc.n_steps},
                      {"principal", exact(mc.principal)},
                      {"principal_se", exact(mc.principal_se)},
                      {"principal_bias", exact(mc.principal_bias())},
                      {"agent", exact(mc.agent)},
                      {"agent_se", exact(mc.agent_se)},
                      {"agent_bias", exact(mc.agent_bias())}};
  write_json(cfg, "summary.json", j);
  log << std::setprecision(8) << "lambda* = " << lambda << "\nJ - lambda* w = " << J - lambda * p.w0
      << "\nMC principal = " << mc.principal << " +- " << mc.principal_se << "\nMC agent = " << mc.agent
      << " +- " << mc.agent_se << '\n';
  return kSuccess;
}

int cmd_first_best(const RunConfig& cfg, std::ostream& log) {
  const auto c = validate(cfg);
  const auto& p = c.params;
  check_promised_value(c, 0.0, p.y0, p.w0);
  const auto ctx = solve(cfg, c);
  const double lambda = solve_lambda_star(ctx, 0.0, p.y0, p.w0);
  ContractOptions co;
  co.promised_values = false;
  const auto path = run_contract(ctx, simulate_income(p, cfg.sim_steps, cfg.seed, 0), lambda, 0.0, co);

  auto out = open_out(cfg, "first_best.csv");
  out << "# " << cfg.comment() << "\nt,Y,C_FB,C_star\n" << std::setprecision(15);
  double last_fb = 0.0, last_star = 0.0;
  for (const auto& n : path.nodes) {
    // C_FB is defined on [0, T); the terminal node reuses its left limit.
    const double fb = first_best_consumption(c, 0.0, n.t, p.w0);
    out << n.t << ',' << n.income << ',' << fb << ',' << n.consumption << '\n';
    last_fb = fb;
    last_star = n.consumption;
  }
  json j = config_json(cfg);
  j["c_fb_0"] = exact(first_best_consumption(c, 0.0, 0.0, p.w0));
  j["c_star_exceeds_first_best_at_end"] = last_star > last_fb;
  write_json(cfg, "first_best.json", j);
  log << std::setprecision(10) << "C_FB(0) = " << first_best_consumption(c, 0.0, 0.0, p.w0)
      << "\nC*(T) " << (last_star > last_fb ? ">" : "<=") << " C_FB(T)\n";
  return kSuccess;
}

int cmd_infinite(const RunConfig& cfg, std::ostream& log) {
  const auto c = validate(cfg);
  const auto& p = c.params;
  const auto contract = infinite_horizon_contract(c, p.y0, p.w0);
  const auto path = contract.run(simulate_income(p, cfg.sim_steps, cfg.seed, 0));
  auto out = open_out(cfg, "infinite_path.csv");
  write_contract_csv(path, out, cfg.comment());

  json j = config_json(cfg);
  j["z_inf"] = exact(c.z_inf);
  j["alpha_minus"] = exact(c.alpha_minus);
  j["alpha_plus"] = exact(c.alpha_plus);
  j["lambda_star_inf"] = exact(contract.lambda);
  j["promised_value_check"] = exact(contract.promised_value(contract.lambda, p.y0));
  write_json(cfg, "infinite.json", j);
  log << std::setprecision(10) << "z_inf = " << c.z_inf << "\nlambda*_inf = " << contract.lambda << '\n';
  return kSuccess;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log, const SuiteOptions& opt) {
  validate(cfg);
  const auto results = run_suite(cfg, opt, [&](const CheckResult& r) { log << format_line(r) << std::endl; });
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    checks.push_back({{"criterion", r.criterion},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"measured", exact(r.measured)},
                      {"tolerance", exact(r.tolerance)},
                      {"seconds", exact(r.seconds)},
                      {"detail", r.detail}});
  }
  json j = config_json(cfg);
  j["all_passed"] = all;
  j["checks"] = checks;
  write_json(cfg, "verify.json", j);
  return all ? kSuccess : kVerificationFailed;
}

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return kRuntimeFailure;
  if (err->has(ErrorCode::W_INFEASIBLE)) return kInfeasiblePromise;
  switch (err->code()) {
    case ErrorCode::RATE_ORDER_VIOLATED:
    case ErrorCode::GAMMA_INVALID:
    case ErrorCode::SIGMA_NONPOSITIVE:
    case ErrorCode::MU_NONPOSITIVE:
    case ErrorCode::HORIZON_NONPOSITIVE:
    case ErrorCode::INCOME_NONPOSITIVE:
    case ErrorCode::RHO_HAT_NONPOSITIVE:
    case ErrorCode::R_HAT_NONPOSITIVE:
    case ErrorCode::K_NONPOSITIVE:
    case ErrorCode::DRIFT_BELOW_HALF_VARIANCE:
    case ErrorCode::Z_INF_OUT_OF_RANGE:
    case ErrorCode::CONFIG_ERROR:
      return kInvalidParameters;
    default:
      return kRuntimeFailure;
  }
}

}  // namespace limcom::app
