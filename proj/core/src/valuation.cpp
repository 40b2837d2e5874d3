#include "limcom/valuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom/normal.hpp"
#include "limcom/quadrature.hpp"

namespace limcom {

std::string_view to_string(Region region) noexcept { return region == Region::JR ? "JR" : "NR"; }

ValuationContext::ValuationContext(BoundaryGrid grid, double quad_tol, double tail_tol)
    : grid_(std::move(grid)), quad_tol_(quad_tol), tail_tol_(tail_tol) {
  if (grid_.times.size() < 2) throw Error(ErrorCode::DOMAIN_ERROR, "empty boundary grid");
  if (!(quad_tol_ > 0.0) || !(tail_tol_ > 0.0)) {
    throw Error(ErrorCode::DOMAIN_ERROR, "tolerances must be positive");
  }
  log_values_.reserve(grid_.values.size());
  for (double v : grid_.values) log_values_.push_back(std::log(v));
}

double ValuationContext::boundary(double t) const { return boundary_at(grid_, t); }

ValuationContext::KernelIntegrals ValuationContext::kernel_integrals(double t, double z, double tol) const {
  const auto& c = grid_.consts;
  const double T = c.params.T;
  const double span = T - t;
  if (span <= 0.0) return {0.0, 0.0, 0.0, 0.0};

  const auto& ts = grid_.times;
  const double log_z = std::log(z);
  const double vol = c.vol();
  const double m1 = c.drift_d1(), mg = c.drift_dgamma();

  // Node interval containing t.
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t j = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  j = std::min(j, ts.size() - 2);

  std::array<double, 4> total{0.0, 0.0, 0.0, 0.0};
  const double root_span = std::sqrt(span);
  double tau_lo = 0.0;
  for (; j + 1 < ts.size(); ++j) {
    const double t_end = ts[j + 1];
    if (t_end <= t) continue;
    const double tau_hi = std::min(root_span, std::sqrt(t_end - t));
    const double s0 = ts[j], s1 = ts[j + 1];
    const double l0 = log_values_[j], l1 = log_values_[j + 1];
    auto integrand = [&](double tau) -> std::array<double, 4> {
      if (tau <= 0.0) return {0.0, 0.0, 0.0, 0.0};
      const double xi = tau * tau;
      const double frac = interpolation_fraction(T, s0, s1, t + xi);
      const double log_ratio = log_z - (l0 + (l1 - l0) * frac);
      const double inv = 1.0 / (vol * tau);
      const double d1 = (log_ratio + m1 * xi) * inv;
      const double dg = (log_ratio + mg * xi) * inv;
      const double wK = 2.0 * tau * std::exp(-c.K * xi);
      const double wR = 2.0 * tau * std::exp(-c.rho_hat * xi);
      return {wK * normal_cdf(dg), wR * normal_cdf(d1), wK * normal_cdf(-dg), wR * normal_cdf(-d1)};
    };
    const double share = tol * (tau_hi - tau_lo) / root_span;
    quad::AdaptiveSimpson<4> piece(std::max(share, 1e-15), 30);
    const auto part = piece.integrate(integrand, tau_lo, tau_hi);
    for (std::size_t k = 0; k < 4; ++k) total[k] += part[k];
    tau_lo = tau_hi;
    if (tau_hi >= root_span) break;
  }
  return {total[0], total[1], total[2], total[3]};
}

namespace {

void check_tz(const DerivedConstants& c, double t, double z) {
  if (!(t >= 0.0 && t <= c.params.T)) throw Error(ErrorCode::DOMAIN_ERROR, "time outside [0, T]");
  if (!(z > 0.0) || !std::isfinite(z)) throw Error(ErrorCode::DOMAIN_ERROR, "dual ratio must be positive");
}

void check_tly(const DerivedConstants& c, double t, double lambda, double y) {
  if (!(t >= 0.0 && t <= c.params.T)) throw Error(ErrorCode::DOMAIN_ERROR, "time outside [0, T]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::DOMAIN_ERROR, "lambda must be positive");
  if (!(y > 0.0) || !std::isfinite(y)) throw Error(ErrorCode::DOMAIN_ERROR, "income must be positive");
}

double annuity(double rate, double horizon) { return -std::expm1(-rate * horizon) / rate; }

// g above the boundary, with an explicit inner tolerance.
double g_continuation(const ValuationContext& ctx, double t, double z, double tol) {
  const auto& c = ctx.consts();
  const auto k = ctx.kernel_integrals(t, z, tol);
  return (k.complement_rho - std::pow(z, c.power()) * k.complement_K) / (1.0 - c.params.gamma);
}

double j0(const DerivedConstants& c, double t, double lambda, double y) {
  const double g = c.params.gamma;
  const double tau = c.params.T - t;
  return g / (1.0 - g) * annuity(c.K, tau) * std::pow(lambda, 1.0 / g) + annuity(c.r_hat, tau) * y;
}

// int_z^inf g(t, u) du by substitution u = z e^v over chunks in which u
// doubles, stopping once a chunk contributes less than tail_tol.
double integrated_g(const ValuationContext& ctx, double t, double z) {
  const double cap = 1e6 * ctx.boundary(t);
  const double width = std::log(2.0);
  double total = 0.0;
  for (int chunk = 0;; ++chunk) {
    const double v0 = chunk * width, v1 = v0 + width;
    if (z * std::exp(v0) > cap) {
      std::ostringstream os;
      os << "outer integral still " << total << " at u=" << z * std::exp(v0);
      throw Error(ErrorCode::TAIL_NOT_CONVERGED, os.str());
    }
    auto integrand = [&](double v) {
      const double u = z * std::exp(v);
      const double inner_tol = 0.1 * ctx.quad_tol() / std::max(1.0, u);
      return g_continuation(ctx, t, u, inner_tol) * u;
    };
    const double part = quad::adaptive_simpson(integrand, v0, v1, ctx.quad_tol(), 30);
    total += part;
    if (std::abs(part) < ctx.tail_tol()) break;
  }
  return total;
}

double dual_J_nr(const ValuationContext& ctx, double t, double lambda, double y) {
  const auto& c = ctx.consts();
  const double z = lambda / std::pow(y, c.params.gamma);
  return -y * integrated_g(ctx, t, z) + j0(c, t, lambda, y);
}

}  // namespace

double obstacle_h(const DerivedConstants& c, double t, double z) {
  check_tz(c, t, z);
  const double tau = c.params.T - t;
  return (annuity(c.rho_hat, tau) - annuity(c.K, tau) * std::pow(z, c.power())) / (1.0 - c.params.gamma);
}

double premium_Q(const ValuationContext& ctx, double t, double z) {
  const auto& c = ctx.consts();
  check_tz(c, t, z);
  if (t >= c.params.T || z <= ctx.boundary(t)) return 0.0;
  const auto k = ctx.kernel_integrals(t, z, ctx.quad_tol());
  return (std::pow(z, c.power()) * k.direct_K - k.direct_rho) / (1.0 - c.params.gamma);
}

double value_matching_residual(const ValuationContext& ctx, double t) {
  const auto& c = ctx.consts();
  if (t >= c.params.T) return 0.0;
  const double z = ctx.boundary(t);
  const auto k = ctx.kernel_integrals(t, z, ctx.quad_tol());
  return (std::pow(z, c.power()) * k.direct_K - k.direct_rho) / (1.0 - c.params.gamma);
}

double stop_value_g(const ValuationContext& ctx, double t, double z) {
  const auto& c = ctx.consts();
  check_tz(c, t, z);
  if (t >= c.params.T) return 0.0;
  if (z <= ctx.boundary(t)) return obstacle_h(c, t, z);
  return g_continuation(ctx, t, z, ctx.quad_tol());
}

double premium_Q_infinity(double z, const DerivedConstants& c) {
  if (!(z > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "dual ratio must be positive");
  if (z <= c.z_inf) return 0.0;
  const double g = c.params.gamma, a = c.power(), am = c.alpha_minus;
  const double coeff = -(1.0 / g) / c.K / am * std::pow(c.z_inf, a - am);
  return coeff * std::pow(z, am) + (std::pow(z, a) / c.K - 1.0 / c.rho_hat) / (1.0 - g);
}

double premium_Q_infinity_slope(double z, const DerivedConstants& c) {
  if (!(z > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "dual ratio must be positive");
  if (z <= c.z_inf) return 0.0;
  const double g = c.params.gamma, a = c.power(), am = c.alpha_minus;
  const double coeff = -(1.0 / g) / c.K / am * std::pow(c.z_inf, a - am);
  return coeff * am * std::pow(z, am - 1.0) + a * std::pow(z, a - 1.0) / c.K / (1.0 - g);
}

double g_infinity(double z, const DerivedConstants& c) {
  return premium_Q_infinity(z, c) + (1.0 / c.rho_hat - std::pow(z, c.power()) / c.K) / (1.0 - c.params.gamma);
}

Region classify_region(const ValuationContext& ctx, double t, double lambda, double y) {
  const auto& c = ctx.consts();
  check_tly(c, t, lambda, y);
  return lambda <= ctx.boundary(t) * std::pow(y, c.params.gamma) ? Region::JR : Region::NR;
}

double dual_J(const ValuationContext& ctx, double t, double lambda, double y) {
  const auto& c = ctx.consts();
  check_tly(c, t, lambda, y);
  if (t >= c.params.T) return 0.0;
  const double edge = ctx.boundary(t) * std::pow(y, c.params.gamma);
  if (lambda <= edge) {
    return dual_J_nr(ctx, t, edge, y) + (lambda - edge) * autarky_value(c, t, y);
  }
  return dual_J_nr(ctx, t, lambda, y);
}

double marginal_dual(const ValuationContext& ctx, double t, double lambda, double y) {
  const auto& c = ctx.consts();
  check_tly(c, t, lambda, y);
  if (t >= c.params.T) return 0.0;
  const double g = c.params.gamma;
  const double z = lambda / std::pow(y, g);
  if (z <= ctx.boundary(t)) return autarky_value(c, t, y);
  const auto k = ctx.kernel_integrals(t, z, ctx.quad_tol());
  return (std::pow(y, 1.0 - g) * k.complement_rho + std::pow(lambda, c.power()) * k.direct_K) / (1.0 - g);
}

HjbResidual hjb_residual(const ValuationContext& ctx, double t, double lambda, double y) {
  const auto& c = ctx.consts();
  const auto& p = c.params;
  check_tly(c, t, lambda, y);
  const Region region = classify_region(ctx, t, lambda, y);
  if (t >= p.T) {
    return {region, 0.0, 0.0, std::abs(y) + std::abs(dual_utility(lambda, p.gamma))};
  }

  const double ht = std::min(1e-3, 0.5 * (p.T - t));
  const double hy = 1e-2 * y;
  const double hl = 1e-3 * lambda;

  // Every stencil point, pushed out to twice the step, must share the
  // region of the centre.
  auto same_region = [&](double tt, double ll, double yy) {
    return classify_region(ctx, std::clamp(tt, 0.0, p.T), ll, yy) == region;
  };
  const bool inside = same_region(t, lambda + 2 * hl, y) && same_region(t, lambda - 2 * hl, y) &&
                      same_region(t, lambda, y + 2 * hy) && same_region(t, lambda, y - 2 * hy) &&
                      same_region(t + 2 * ht, lambda, y) && same_region(t - 2 * ht, lambda, y);
  if (!inside) {
    std::ostringstream os;
    os << "stencil at (t=" << t << ", lambda=" << lambda << ", y=" << y << ") crosses the free boundary";
    throw Error(ErrorCode::STENCIL_ACROSS_BOUNDARY, os.str());
  }

  const double J = dual_J(ctx, t, lambda, y);
  double J_t;
  if (t - ht >= 0.0) {
    J_t = (dual_J(ctx, t + ht, lambda, y) - dual_J(ctx, t - ht, lambda, y)) / (2 * ht);
  } else {
    J_t = (-3 * J + 4 * dual_J(ctx, t + ht, lambda, y) - dual_J(ctx, t + 2 * ht, lambda, y)) / (2 * ht);
  }
  const double J_yp = dual_J(ctx, t, lambda, y + hy), J_ym = dual_J(ctx, t, lambda, y - hy);
  const double J_y = (J_yp - J_ym) / (2 * hy);
  const double J_yy = (J_yp - 2 * J + J_ym) / (hy * hy);
  const double J_l = (dual_J(ctx, t, lambda + hl, y) - dual_J(ctx, t, lambda - hl, y)) / (2 * hl);

  const double dual_u = dual_utility(lambda, p.gamma);
  HjbResidual out;
  out.region = region;
  out.pde = J_t + 0.5 * p.sigma * p.sigma * y * y * J_yy + p.mu * y * J_y + (p.r - p.rho) * lambda * J_l -
            p.r * J + y + dual_u;
  out.gradient = J_l - autarky_value(c, t, y);
  out.scale = std::abs(y) + std::abs(dual_u);
  return out;
}

void write_value_surface(const ValuationContext& ctx, std::span<const double> times,
                         std::span<const double> ratios, std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,z,Q,g\n" << std::setprecision(15);
  for (double t : times) {
    for (double z : ratios) {
      out << t << ',' << z << ',' << premium_Q(ctx, t, z) << ',' << stop_value_g(ctx, t, z) << '\n';
    }
  }
}

}  // namespace limcom
