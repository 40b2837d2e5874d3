#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "limcom/boundary.hpp"
#include "limcom/model.hpp"

namespace limcom {

enum class Region { JR, NR };

std::string_view to_string(Region region) noexcept;

/// Immutable evaluation context: constants, solved boundary and tolerances.
/// Safe to share across threads.
class ValuationContext {
 public:
  explicit ValuationContext(BoundaryGrid grid, double quad_tol = 1e-9, double tail_tol = 1e-9);

  const DerivedConstants& consts() const noexcept { return grid_.consts; }
  const ModelParams& params() const noexcept { return grid_.consts.params; }
  const BoundaryGrid& grid() const noexcept { return grid_; }
  double quad_tol() const noexcept { return quad_tol_; }
  double tail_tol() const noexcept { return tail_tol_; }

  double boundary(double t) const;

  /// Time integrals from t to T of the discounted normal kernels at dual
  /// ratio z, computed by adaptive Simpson in sqrt(s - t):
  ///   direct_K   = int e^{-K xi} N(d^gamma)      complement_K   = int e^{-K xi} N(-d^gamma)
  ///   direct_rho = int e^{-rho_hat xi} N(d^1)    complement_rho = int e^{-rho_hat xi} N(-d^1)
  struct KernelIntegrals {
    double direct_K;
    double direct_rho;
    double complement_K;
    double complement_rho;
  };
  KernelIntegrals kernel_integrals(double t, double z, double tol) const;

 private:
  BoundaryGrid grid_;
  std::vector<double> log_values_;
  double quad_tol_;
  double tail_tol_;
};

/// Stopping payoff h(t, z).
double obstacle_h(const DerivedConstants& c, double t, double z);

/// Early-exercise premium Q(t, z); zero on and below the boundary.
double premium_Q(const ValuationContext& ctx, double t, double z);

/// The premium representation evaluated on the boundary itself, with adaptive
/// quadrature against the interpolated boundary. Zero for the exact boundary;
/// measures the discretization error of the solved grid.
double value_matching_residual(const ValuationContext& ctx, double t);

/// Stopping value g = Q + h, evaluated in the cancellation-free form above
/// the boundary.
double stop_value_g(const ValuationContext& ctx, double t, double z);

/// Infinite-horizon limits.
double premium_Q_infinity(double z, const DerivedConstants& c);
double g_infinity(double z, const DerivedConstants& c);
/// dQ_inf/dz, used for the smooth-pasting check.
double premium_Q_infinity_slope(double z, const DerivedConstants& c);

/// Dual value J(t, lambda, y). Linear in lambda on the jump region.
double dual_J(const ValuationContext& ctx, double t, double lambda, double y);

/// dJ/dlambda, the promised value delivered by multiplier lambda. Equal to
/// the autarky value on the jump region.
double marginal_dual(const ValuationContext& ctx, double t, double lambda, double y);

/// Jump region iff lambda <= z*(t) y^gamma.
Region classify_region(const ValuationContext& ctx, double t, double lambda, double y);

struct HjbResidual {
  Region region;
  /// dJ/dt + sigma^2/2 y^2 J_yy + mu y J_y + (r - rho) lambda J_lambda - r J + y + u~(lambda).
  double pde;
  /// J_lambda - U_d(t, y).
  double gradient;
  /// |y| + |u~(lambda)|, the scale used for the PDE tolerance.
  double scale;
};

/// Central finite-difference evaluation of both HJB branches. Throws
/// STENCIL_ACROSS_BOUNDARY if the stencil leaves the region of the centre.
HjbResidual hjb_residual(const ValuationContext& ctx, double t, double lambda, double y);

/// CSV `t,z,Q,g` on the lattice times x ratios.
void write_value_surface(const ValuationContext& ctx, std::span<const double> times,
                         std::span<const double> ratios, std::ostream& out,
                         const std::string& comment = {});

}  // namespace limcom
