#include "limcom/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "limcom/error.hpp"

namespace limcom {

double DerivedConstants::drift_d1() const noexcept {
  const double v = vol();
  return r_hat - rho_hat + 0.5 * v * v;
}

double DerivedConstants::drift_dgamma() const noexcept {
  const double v = vol();
  return r_hat - rho_hat - 0.5 * v * v + v * v / params.gamma;
}

DerivedConstants derive_constants(const ModelParams& p) {
  std::vector<ErrorCode> violations;
  std::ostringstream detail;
  auto fail = [&](ErrorCode code, const char* what) {
    violations.push_back(code);
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  };

  const bool finite = std::isfinite(p.rho) && std::isfinite(p.r) && std::isfinite(p.mu) &&
                      std::isfinite(p.sigma) && std::isfinite(p.gamma) && std::isfinite(p.T) &&
                      std::isfinite(p.y0);
  if (!finite) throw Error(ErrorCode::DOMAIN_ERROR, "non-finite model parameter");

  if (!(p.r > 0.0 && p.r <= p.rho)) fail(ErrorCode::RATE_ORDER_VIOLATED, "need 0 < r <= rho");
  if (!(p.gamma > 0.0) || p.gamma == 1.0) fail(ErrorCode::GAMMA_INVALID, "need gamma > 0, gamma != 1");
  if (!(p.sigma > 0.0)) fail(ErrorCode::SIGMA_NONPOSITIVE, "need sigma > 0");
  if (!(p.mu > 0.0)) fail(ErrorCode::MU_NONPOSITIVE, "need mu > 0");
  if (!(p.T > 0.0)) fail(ErrorCode::HORIZON_NONPOSITIVE, "need T > 0");
  if (!(p.y0 > 0.0)) fail(ErrorCode::INCOME_NONPOSITIVE, "need y0 > 0");

  DerivedConstants c;
  c.params = p;
  c.rho_hat = p.rho - (1.0 - p.gamma) * p.mu + 0.5 * p.gamma * (1.0 - p.gamma) * p.sigma * p.sigma;
  c.r_hat = p.r - p.mu;
  c.K = p.gamma != 0.0 ? p.r + (p.rho - p.r) / p.gamma : 0.0;

  if (!(c.rho_hat > 0.0)) fail(ErrorCode::RHO_HAT_NONPOSITIVE, "need rho_hat > 0");
  if (!(c.r_hat > 0.0)) fail(ErrorCode::R_HAT_NONPOSITIVE, "need r - mu > 0");
  if (!(c.K > 0.0)) fail(ErrorCode::K_NONPOSITIVE, "need r + (rho - r)/gamma > 0");
  if (!(p.mu > 0.5 * p.sigma * p.sigma))
    fail(ErrorCode::DRIFT_BELOW_HALF_VARIANCE, "need mu > sigma^2/2");

  if (!violations.empty()) throw Error(std::move(violations), detail.str());

  // Roots of A a^2 + B a - rho_hat, via the cancellation-free form.
  const double v = c.vol();
  const double A = 0.5 * v * v;
  const double B = c.r_hat - c.rho_hat + 0.5 * v * v;
  const double disc = std::sqrt(B * B + 4.0 * A * c.rho_hat);
  const double q = -0.5 * (B + std::copysign(disc, B));
  const double r1 = q / A;
  const double r2 = -c.rho_hat / q;
  c.alpha_plus = std::max(r1, r2);
  c.alpha_minus = std::min(r1, r2);

  const double g = p.gamma;
  const double base = c.rho_hat * (c.alpha_minus * g + g - 1.0) / (c.K * c.alpha_minus * g);
  c.z_inf = std::pow(base, g / (g - 1.0));
  c.z_T = 1.0;

  if (!(c.alpha_minus < -1.0) || !(c.z_inf > 0.0 && c.z_inf < 1.0)) {
    std::ostringstream os;
    os << "alpha_minus=" << c.alpha_minus << " z_inf=" << c.z_inf;
    throw Error(ErrorCode::Z_INF_OUT_OF_RANGE, os.str());
  }
  return c;
}

double characteristic(const DerivedConstants& c, double alpha) noexcept {
  const double v = c.vol();
  return 0.5 * v * v * alpha * alpha + (c.r_hat - c.rho_hat + 0.5 * v * v) * alpha - c.rho_hat;
}

void check_promised_value(const DerivedConstants& c, double t, double y, double w) {
  const double ud = autarky_value(c, t, y);
  if (!(w >= ud)) {
    std::ostringstream os;
    os << "w=" << w << " below autarky value " << ud;
    throw Error(ErrorCode::W_INFEASIBLE, os.str());
  }
  if (c.params.gamma > 1.0 && !(w < 0.0)) {
    std::ostringstream os;
    os << "w=" << w << " must be negative when gamma > 1";
    throw Error(ErrorCode::W_INFEASIBLE, os.str());
  }
}

double utility(double c, double gamma) {
  if (!(c > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "utility needs positive consumption");
  return std::pow(c, 1.0 - gamma) / (1.0 - gamma);
}

double dual_utility(double z, double gamma) {
  if (!(z > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "dual utility needs positive weight");
  return gamma / (1.0 - gamma) * std::pow(z, 1.0 / gamma);
}

double autarky_value(const DerivedConstants& c, double t, double y) {
  const auto& p = c.params;
  if (!(t >= 0.0 && t <= p.T)) throw Error(ErrorCode::DOMAIN_ERROR, "autarky value needs 0 <= t <= T");
  if (!(y > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "autarky value needs y > 0");
  const double annuity = -std::expm1(-c.rho_hat * (p.T - t)) / c.rho_hat;
  return std::pow(y, 1.0 - p.gamma) / (1.0 - p.gamma) * annuity;
}

double first_best_consumption(const DerivedConstants& c, double t, double s, double w) {
  const auto& p = c.params;
  if (!(t >= 0.0 && t <= s && s <= p.T)) {
    throw Error(ErrorCode::DOMAIN_ERROR, "first-best consumption needs 0 <= t <= s <= T");
  }
  const double scale = c.K * (1.0 - p.gamma) * w;
  if (!(w * (1.0 - p.gamma) > 0.0) || t >= p.T) {
    throw Error(ErrorCode::W_INFEASIBLE, "first-best needs w(1-gamma) > 0 and t < T");
  }
  const double level = std::pow(scale / -std::expm1(-c.K * (p.T - t)), 1.0 / (1.0 - p.gamma));
  return std::exp(-(p.rho - p.r) / p.gamma * (s - t)) * level;
}

}  // namespace limcom
