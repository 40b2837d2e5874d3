#include "limcom/contract.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom/parallel.hpp"
#include "limcom/rng.hpp"

namespace limcom {
namespace {

constexpr double kHitTolerance = 1e-14;

// Bisection in log(lambda) on an increasing function f with f(lo) < 0 <= f(hi).
template <class F>
double bisect_log(F&& f, double lo, double hi) {
  double log_lo = std::log(lo), log_hi = std::log(hi);
  while (log_hi - log_lo > 1e-14) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (f(std::exp(mid)) < 0.0) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

}  // namespace

IncomePath simulate_income(const ModelParams& p, int n_steps, std::uint64_t seed, std::uint64_t path_index) {
  if (n_steps < 1) throw Error(ErrorCode::DOMAIN_ERROR, "income path needs at least one step");
  IncomePath path;
  path.seed = seed;
  path.path_index = path_index;
  path.times.resize(static_cast<std::size_t>(n_steps) + 1);
  path.values.resize(path.times.size());
  const double dt = p.T / n_steps;
  const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * dt;
  const double shock = p.sigma * std::sqrt(dt);
  double log_y = std::log(p.y0);
  path.times[0] = 0.0;
  path.values[0] = p.y0;
  for (int i = 0; i < n_steps; ++i) {
    const double xi = p.sigma == 0.0 ? 0.0 : keyed_normal(seed, path_index, static_cast<std::uint64_t>(i));
    log_y += drift + shock * xi;
    path.times[i + 1] = (i + 1 == n_steps) ? p.T : dt * (i + 1);
    path.values[i + 1] = std::exp(log_y);
  }
  return path;
}

double solve_lambda_star(const ValuationContext& ctx, double t, double y, double w) {
  const auto& c = ctx.consts();
  check_promised_value(c, t, y, w);
  const double edge = ctx.boundary(t) * std::pow(y, c.params.gamma);
  auto excess = [&](double lambda) { return marginal_dual(ctx, t, lambda, y) - w; };

  // A promise equal to autarky binds now. Smooth pasting flattens the marginal
  // at the boundary, so root-finding there would magnify discretization noise.
  if (w <= autarky_value(c, t, y)) return edge;
  const double lo = edge * (1.0 + 1e-10);
  if (excess(lo) >= 0.0) return edge;
  double hi = 2.0 * lo;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e30) {
      std::ostringstream os;
      os << "no multiplier below 1e30 delivers w=" << w;
      throw Error(ErrorCode::BRACKET_FAILURE, os.str());
    }
  }
  return bisect_log(excess, std::max(lo, 0.5 * hi), hi);
}

ContractPath run_contract(const ValuationContext& ctx, const IncomePath& path, double lambda_star, double t0,
                          const ContractOptions& options) {
  const auto& c = ctx.consts();
  const auto& p = c.params;
  if (path.times.size() != path.values.size() || path.times.empty()) {
    throw Error(ErrorCode::DOMAIN_ERROR, "malformed income path");
  }
  if (!(lambda_star > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "lambda* must be positive");

  auto first = std::lower_bound(path.times.begin(), path.times.end(), t0 - 1e-12);
  if (first == path.times.end() || std::abs(*first - t0) > 1e-9) {
    throw Error(ErrorCode::DOMAIN_ERROR, "t0 must be a node of the income path");
  }
  const auto start = static_cast<std::size_t>(first - path.times.begin());

  ContractPath out;
  out.nodes.reserve(path.times.size() - start);
  const double excess_rate = p.rho - p.r;
  double costate = lambda_star;
  for (std::size_t i = start; i < path.times.size(); ++i) {
    const double s = std::min(path.times[i], p.T);
    const double y = path.values[i];
    const double candidate = std::exp(excess_rate * (s - t0)) * std::pow(y, p.gamma) * ctx.boundary(s);
    const bool hit = candidate > costate * (1.0 + kHitTolerance);
    if (hit) costate = candidate;

    ContractNode node{};
    node.t = s;
    node.income = y;
    node.costate = costate;
    node.multiplier = std::exp(-excess_rate * (s - t0)) * costate;
    node.consumption = std::pow(node.multiplier, 1.0 / p.gamma);
    node.autarky = autarky_value(c, s, y);
    node.promised = options.promised_values ? marginal_dual(ctx, s, node.multiplier, y)
                                            : std::numeric_limits<double>::quiet_NaN();
    node.jr_hit = hit;
    out.nodes.push_back(node);
  }
  return out;
}

double InfiniteHorizonContract::promised_value(double lambda, double y) const {
  const auto& c = consts;
  const double g = c.params.gamma, a = c.power(), am = c.alpha_minus;
  const double edge = c.z_inf * std::pow(y, g);
  if (lambda <= edge) return std::pow(y, 1.0 - g) / ((1.0 - g) * c.rho_hat);
  return -(1.0 / g) / c.K / am * std::pow(edge, a - am) * std::pow(lambda, am) +
         std::pow(lambda, a) / ((1.0 - g) * c.K);
}

ContractPath InfiniteHorizonContract::run(const IncomePath& path) const {
  const auto& p = consts.params;
  ContractPath out;
  const double t0 = path.times.front();
  const double excess_rate = p.rho - p.r;
  double costate = lambda;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double s = path.times[i] - t0;
    const double y = path.values[i];
    const double candidate = consts.z_inf * std::exp(excess_rate * s) * std::pow(y, p.gamma);
    const bool hit = candidate > costate * (1.0 + kHitTolerance);
    if (hit) costate = candidate;
    ContractNode node{};
    node.t = path.times[i];
    node.income = y;
    node.costate = costate;
    node.multiplier = std::exp(-excess_rate * s) * costate;
    node.consumption = std::pow(node.multiplier, 1.0 / p.gamma);
    node.promised = promised_value(node.multiplier, y);
    node.autarky = std::pow(y, 1.0 - p.gamma) / ((1.0 - p.gamma) * consts.rho_hat);
    node.jr_hit = hit;
    out.nodes.push_back(node);
  }
  return out;
}

InfiniteHorizonContract infinite_horizon_contract(const DerivedConstants& consts, double y, double w) {
  if (!(y > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "income must be positive");
  InfiniteHorizonContract contract{consts, 0.0, y};
  const double g = consts.params.gamma;
  const double edge = consts.z_inf * std::pow(y, g);
  const double floor_value = contract.promised_value(edge, y);
  if (!(w >= floor_value) || (g > 1.0 && !(w < 0.0))) {
    std::ostringstream os;
    os << "w=" << w << " infeasible; autarky limit is " << floor_value;
    throw Error(ErrorCode::W_INFEASIBLE, os.str());
  }
  // At the boundary the algebraic map may differ from the autarky limit by
  // rounding; evaluate it directly there.
  auto excess = [&](double lambda) {
    const double am = consts.alpha_minus, a = consts.power();
    return -(1.0 / g) / consts.K / am * std::pow(edge, a - am) * std::pow(lambda, am) +
           std::pow(lambda, a) / ((1.0 - g) * consts.K) - w;
  };
  if (excess(edge) >= 0.0) {
    contract.lambda = edge;
    return contract;
  }
  double hi = 2.0 * edge;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e30) throw Error(ErrorCode::BRACKET_FAILURE, "infinite-horizon multiplier above 1e30");
  }
  contract.lambda = bisect_log(excess, std::max(edge, 0.5 * hi), hi);
  return contract;
}

double MonteCarloResult::principal_bias() const {
  return std::abs(principal - principal_coarse) / (std::sqrt(2.0) - 1.0);
}

double MonteCarloResult::agent_bias() const { return std::abs(agent - agent_coarse) / (std::sqrt(2.0) - 1.0); }

MonteCarloResult monte_carlo_check(const ValuationContext& ctx, double lambda_star, std::size_t n_paths,
                                   int n_steps, std::uint64_t seed) {
  const auto& c = ctx.consts();
  const auto& p = c.params;
  if (n_paths < 2) throw Error(ErrorCode::DOMAIN_ERROR, "Monte Carlo needs at least two paths");
  if (n_steps < 2 || n_steps % 2 != 0) throw Error(ErrorCode::DOMAIN_ERROR, "Monte Carlo needs an even step count");
  if (!(lambda_star > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "lambda* must be positive");

  const auto n = static_cast<std::size_t>(n_steps);
  const double dt = p.T / n_steps;
  const double g = p.gamma;
  const double excess_rate = p.rho - p.r;
  const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * dt;
  const double shock = p.sigma * std::sqrt(dt);

  // Node-only quantities.
  std::vector<double> log_barrier(n + 1), disc_r(n + 1), disc_rho(n + 1), shift(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? p.T : dt * static_cast<double>(i);
    log_barrier[i] = excess_rate * t + std::log(ctx.boundary(t));
    disc_r[i] = std::exp(-p.r * t);
    disc_rho[i] = std::exp(-p.rho * t);
    shift[i] = excess_rate * t;
  }
  const double log_lambda = std::log(lambda_star);

  // Per path: fine principal, fine agent, coarse principal, coarse agent.
  std::vector<std::array<double, 4>> per_path(n_paths);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> log_y(n + 1);
    for (std::size_t k = begin; k < end; ++k) {
      log_y[0] = std::log(p.y0);
      for (std::size_t i = 0; i < n; ++i) {
        log_y[i + 1] = log_y[i] + drift + shock * keyed_normal(seed, k, i);
      }
      std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
      for (int pass = 0; pass < 2; ++pass) {
        const std::size_t stride = pass == 0 ? 1 : 2;
        const double w_end = 0.5 * dt * static_cast<double>(stride);
        double log_x = log_lambda;
        double principal = 0.0, agent = 0.0;
        for (std::size_t i = 0; i <= n; i += stride) {
          log_x = std::max(log_x, log_barrier[i] + g * log_y[i]);
          const double log_c = (log_x - shift[i]) / g;
          const double consumption = std::exp(log_c);
          const double util = std::exp((1.0 - g) * log_c) / (1.0 - g);
          const double weight = (i == 0 || i == n) ? w_end : 2.0 * w_end;
          principal += weight * disc_r[i] * (std::exp(log_y[i]) - consumption);
          agent += weight * disc_rho[i] * util;
        }
        acc[2 * pass] = principal;
        acc[2 * pass + 1] = agent;
      }
      per_path[k] = acc;
    }
  });

  MonteCarloResult res;
  res.n_paths = n_paths;
  res.n_steps = n_steps;
  std::array<double, 4> mean{0.0, 0.0, 0.0, 0.0};
  for (const auto& v : per_path)
    for (std::size_t j = 0; j < 4; ++j) mean[j] += v[j];
  const double count = static_cast<double>(n_paths);
  for (auto& m : mean) m /= count;
  double var_p = 0.0, var_a = 0.0;
  for (const auto& v : per_path) {
    var_p += (v[0] - mean[0]) * (v[0] - mean[0]);
    var_a += (v[1] - mean[1]) * (v[1] - mean[1]);
  }
  res.principal = mean[0];
  res.agent = mean[1];
  res.principal_coarse = mean[2];
  res.agent_coarse = mean[3];
  res.principal_se = std::sqrt(var_p / (count - 1.0) / count);
  res.agent_se = std::sqrt(var_a / (count - 1.0) / count);
  return res;
}

void write_contract_csv(const ContractPath& path, std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,Y,X_star,lambda_s,C_star,w_star,U_d,region\n" << std::setprecision(15);
  for (const auto& nd : path.nodes) {
    out << nd.t << ',' << nd.income << ',' << nd.costate << ',' << nd.multiplier << ',' << nd.consumption << ','
        << nd.promised << ',' << nd.autarky << ',' << (nd.jr_hit ? "JR_HIT" : "NR") << '\n';
  }
}

}  // namespace limcom
