#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "limcom/model.hpp"
#include "limcom/valuation.hpp"

namespace limcom {

/// Income sampled on a uniform grid over [0, T] by exact log-normal steps.
struct IncomePath {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// Y_{i+1} = Y_i exp((mu - sigma^2/2) dt + sigma sqrt(dt) xi_i), with xi_i
/// keyed by (seed, path_index, i).
IncomePath simulate_income(const ModelParams& params, int n_steps, std::uint64_t seed,
                           std::uint64_t path_index = 0);

struct ContractNode {
  double t;
  double income;
  double costate;      // X*: running maximum, floored at lambda*
  double multiplier;   // lambda*_s = e^{-(rho - r)(s - t0)} X*_s
  double consumption;  // (lambda*_s)^{1/gamma}
  double promised;     // w*_s, NaN when not requested
  double autarky;      // U_d(s, Y_s)
  bool jr_hit;         // running maximum rose at this node
};

struct ContractPath {
  std::vector<ContractNode> nodes;
};

struct ContractOptions {
  /// Evaluate w*_s = marginal_dual(s, lambda*_s, Y_s) at every node.
  bool promised_values = true;
};

/// Unique lambda* > z*(t) y^gamma with marginal_dual(t, lambda*, y) = w.
/// Returns the boundary value z*(t) y^gamma when w equals the autarky value.
double solve_lambda_star(const ValuationContext& ctx, double t, double y, double w);

/// Optimal contract along an income path from time t0 (a node of the path).
ContractPath run_contract(const ValuationContext& ctx, const IncomePath& path, double lambda_star,
                          double t0 = 0.0, const ContractOptions& options = {});

/// Infinite-horizon contract.
struct InfiniteHorizonContract {
  DerivedConstants consts;
  double lambda = 0.0;  // lambda*_inf
  double y0 = 0.0;

  /// Promised value delivered by multiplier lambda at income y; the autarky
  /// limit y^(1-gamma) / ((1-gamma) rho_hat) at or below the boundary.
  double promised_value(double lambda, double y) const;
  /// Apply the contract maps along a path (times relative to the start).
  ContractPath run(const IncomePath& path) const;
};

InfiniteHorizonContract infinite_horizon_contract(const DerivedConstants& consts, double y, double w);

struct MonteCarloResult {
  std::size_t n_paths = 0;
  int n_steps = 0;
  double principal = 0.0;     // E int_0^T e^{-rs} (Y_s - C*_s) ds
  double principal_se = 0.0;
  double agent = 0.0;         // E int_0^T e^{-rho s} u(C*_s) ds
  double agent_se = 0.0;
  // Same paths observed on every other node (n_steps / 2); the difference
  // to the fine estimate measures the time-discretization bias.
  double principal_coarse = 0.0;
  double agent_coarse = 0.0;

  /// Richardson estimate of the remaining bias, assuming the sqrt(dt)
  /// rate of a discretely monitored running maximum.
  double principal_bias() const;
  double agent_bias() const;
};

/// Monte Carlo estimates of the principal's and the agent's values under
/// the optimal contract started at t = 0 with multiplier lambda_star.
MonteCarloResult monte_carlo_check(const ValuationContext& ctx, double lambda_star, std::size_t n_paths,
                                   int n_steps, std::uint64_t seed);

/// CSV `t,Y,X_star,lambda_s,C_star,w_star,U_d,region` (region JR_HIT or NR).
void write_contract_csv(const ContractPath& path, std::ostream& out, const std::string& comment = {});

}  // namespace limcom
