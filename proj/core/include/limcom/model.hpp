#pragma once

// Economic primitives of the limited-commitment insurance model: CRRA
// agent, risk-neutral principal, GBM income. All rates are per year.

namespace limcom {

struct ModelParams {
  double rho = 0.04;    // agent discount rate
  double r = 0.04;      // risk-free rate
  double mu = 0.02;     // income drift
  double sigma = 0.1;   // income volatility
  double gamma = 3.0;   // relative risk aversion
  double T = 30.0;      // contract horizon (years)
  double y0 = 1.0;      // initial income
  double w0 = -5.0;     // initial promised value (utils)

  bool operator==(const ModelParams&) const = default;
};

/// Everything computable from ModelParams alone. Immutable once built.
struct DerivedConstants {
  ModelParams params;
  double rho_hat = 0.0;      // effective autarky discount
  double r_hat = 0.0;        // r - mu
  double K = 0.0;            // r + (rho - r) / gamma
  double alpha_plus = 0.0;   // roots of the characteristic quadratic
  double alpha_minus = 0.0;
  double z_inf = 0.0;        // infinite-horizon free-boundary level
  double z_T = 1.0;          // terminal free-boundary level

  /// Volatility of the log dual ratio, gamma * sigma.
  double vol() const noexcept { return params.gamma * params.sigma; }
  /// Exponent 1/gamma - 1 that appears throughout the value functions.
  double power() const noexcept { return 1.0 / params.gamma - 1.0; }
  /// Log-drift of the dual ratio under the stopping measure plus half the
  /// variance; the drift term of d^1.
  double drift_d1() const noexcept;
  /// Drift term of d^gamma.
  double drift_dgamma() const noexcept;

  bool operator==(const DerivedConstants&) const = default;
};

/// Validates the model assumptions (every violation is reported, none are
/// clamped) and computes the derived constants. Does not check w0.
DerivedConstants derive_constants(const ModelParams& params);

/// f(alpha) = (gamma sigma)^2/2 alpha^2 + (r_hat - rho_hat + (gamma sigma)^2/2) alpha - rho_hat.
double characteristic(const DerivedConstants& c, double alpha) noexcept;

/// Throws W_INFEASIBLE unless w >= U_d(t, y) (and w < 0 when gamma > 1).
void check_promised_value(const DerivedConstants& c, double t, double y, double w);

/// CRRA utility c^(1-gamma) / (1-gamma).
double utility(double c, double gamma);

/// Convex dual of the utility, max_c { z u(c) - c } = gamma/(1-gamma) z^(1/gamma).
double dual_utility(double z, double gamma);

/// Autarky value of an agent with income y at time t.
double autarky_value(const DerivedConstants& c, double t, double y);

/// First-best consumption at time s for a contract started at t with
/// promised value w.
double first_best_consumption(const DerivedConstants& c, double t, double s, double w);

}  // namespace limcom
