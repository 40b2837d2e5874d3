#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom/normal.hpp"
#include "limcom/valuation.hpp"
#include "support.hpp"

using namespace limcom;
using limcom::testing::context;
using limcom::testing::baseline;
using limcom::testing::rel;

namespace {

// Q_inf by direct quadrature of its integral representation with the
// boundary frozen at z_inf.
double q_infinity_quadrature(double z, const DerivedConstants& c) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double lr = std::log(z / c.z_inf), s = c.vol();
  auto part = [&](double rate, double drift) {
    return integrator.integrate(
        [&](double tau) {
          const double xi = tau * tau;
          return 2 * tau * std::exp(-rate * xi) * 0.5 * std::erfc(-(lr + drift * xi) / (s * tau) / std::sqrt(2.0));
        },
        1e-13);
  };
  const double g = c.params.gamma;
  return (std::pow(z, c.power()) * part(c.K, c.drift_dgamma()) - part(c.rho_hat, c.drift_d1())) / (1 - g);
}

}  // namespace

TEST(Obstacle, Values) {
  auto c = derive_constants(baseline());
  EXPECT_EQ(obstacle_h(c, 30.0, 0.7), 0.0);
  EXPECT_NEAR(obstacle_h(c, 0.0, 1.0), 0.966375, 5e-6);
  const double ann_rho = (1 - std::exp(-1.5)) / 0.05, ann_K = (1 - std::exp(-1.2)) / 0.04;
  EXPECT_NEAR(obstacle_h(c, 0.0, 1.0), -0.5 * (ann_rho - ann_K), 1e-13);
  c.K = c.rho_hat;
  EXPECT_NEAR(obstacle_h(c, 3.0, 1.0), 0.0, 1e-14);
}

TEST(PremiumQ, ZeroBelowBoundaryAndAtMaturity) {
  const auto& ctx = context();
  const auto& c = ctx.consts();
  EXPECT_EQ(premium_Q(ctx, 0.0, c.z_inf), 0.0);
  EXPECT_EQ(premium_Q(ctx, 10.0, 0.3), 0.0);
  EXPECT_EQ(premium_Q(ctx, 10.0, ctx.boundary(10.0)), 0.0);
  EXPECT_EQ(premium_Q(ctx, 30.0, 3.0), 0.0);
  EXPECT_GT(premium_Q(ctx, 10.0, 1.5 * ctx.boundary(10.0)), 0.0);
}

TEST(PremiumQ, ContinuousAcrossBoundary) {
  // Above the boundary Q starts from the discretization error of the grid,
  // not from exactly zero.
  const auto& ctx = context();
  for (double t : {0.0, 12.3, 29.0}) {
    const double zb = ctx.boundary(t);
    EXPECT_LT(std::abs(premium_Q(ctx, t, zb * (1 + 1e-6))), 1e-6) << t;
    EXPECT_LT(std::abs(premium_Q(ctx, t, zb * (1 + 1e-3))), 1e-5) << t;
  }
}

TEST(PremiumQ, LongHorizonMatchesInfiniteLimit) {
  ModelParams p;
  p.T = 200;
  const auto& ctx = context(p, 1024);
  EXPECT_LT(rel(premium_Q(ctx, 0.0, 2.0), premium_Q_infinity(2.0, ctx.consts())), 1e-3);
}

TEST(PremiumQInfinity, SmoothPastingAndQuadrature) {
  const auto c = derive_constants(baseline());
  EXPECT_NEAR(premium_Q_infinity(c.z_inf, c), 0.0, 1e-13);
  EXPECT_NEAR(premium_Q_infinity_slope(c.z_inf, c), 0.0, 1e-12);
  EXPECT_EQ(premium_Q_infinity(0.5 * c.z_inf, c), 0.0);
  for (double z : {0.5, 1.0, 3.0}) {
    EXPECT_LT(rel(premium_Q_infinity(z, c), q_infinity_quadrature(z, c)), 1e-8) << z;
  }
  const double z = 1.0, h = 1e-5;
  EXPECT_NEAR(premium_Q_infinity_slope(z, c),
              (premium_Q_infinity(z + h, c) - premium_Q_infinity(z - h, c)) / (2 * h), 1e-7);
}

TEST(StopValue, MatchesObstacleAtBoundaryAndMaturity) {
  const auto& ctx = context();
  const auto& c = ctx.consts();
  for (double t : {0.0, 15.0}) {
    const double zb = ctx.boundary(t);
    EXPECT_NEAR(stop_value_g(ctx, t, zb), obstacle_h(c, t, zb), 1e-12);
  }
  EXPECT_EQ(stop_value_g(ctx, 30.0, 2.0), 0.0);
  // cancellation-free form agrees with Q + h where both are accurate
  const double z = 1.3;
  EXPECT_NEAR(stop_value_g(ctx, 5.0, z), premium_Q(ctx, 5.0, z) + obstacle_h(c, 5.0, z), 1e-8);
}

TEST(StopValue, TailDecays) {
  const auto& ctx = context();
  double prev = 1e300;
  for (double z : {1.0, 10.0, 50.0, 100.0, 500.0, 1000.0, 5000.0}) {
    const double zg = z * stop_value_g(ctx, 0.0, z);
    EXPECT_GT(zg, 0.0);
    EXPECT_LT(zg, prev) << z;
    prev = zg;
  }
  EXPECT_LT(5000.0 * stop_value_g(ctx, 0.0, 5000.0), 1e-4);
}

TEST(DualJ, TerminalAndHomogeneity) {
  const auto& ctx = context();
  EXPECT_EQ(dual_J(ctx, 30.0, 2.0, 1.0), 0.0);
  const double lambda = 1.8, k = 2.0, g = 3.0;
  for (double t : {0.0, 7.0}) {
    EXPECT_LT(rel(dual_J(ctx, t, std::pow(k, g) * lambda, k), k * dual_J(ctx, t, lambda, 1.0)), 1e-8);
  }
}

TEST(DualJ, LinearOnJumpRegion) {
  const auto& ctx = context();
  const double t = 4.0, y = 1.2;
  const double edge = ctx.boundary(t) * std::pow(y, 3.0);
  const double l1 = 0.5 * edge, l2 = 0.9 * edge;
  EXPECT_NEAR(dual_J(ctx, t, l2, y) - dual_J(ctx, t, l1, y), (l2 - l1) * autarky_value(ctx.consts(), t, y), 1e-12);
}

TEST(MarginalDual, BoundaryValueMatching) {
  const auto& ctx = context();
  for (double t : {0.0, 10.0, 25.0, 29.5}) {
    for (double y : {0.7, 1.0, 1.6}) {
      const double edge = ctx.boundary(t) * std::pow(y, 3.0);
      EXPECT_NEAR(marginal_dual(ctx, t, edge * (1 + 1e-10), y), autarky_value(ctx.consts(), t, y), 1e-6);
      EXPECT_NEAR(marginal_dual(ctx, t, edge, y), autarky_value(ctx.consts(), t, y), 1e-6);
      EXPECT_EQ(marginal_dual(ctx, t, 0.99 * edge, y), autarky_value(ctx.consts(), t, y));
    }
  }
  EXPECT_EQ(marginal_dual(ctx, 30.0, 1.0, 1.0), 0.0);
}

TEST(MarginalDual, FiniteDifferenceOfJ) {
  const auto& ctx = context();
  for (double z : {0.6, 1.0, 2.5}) {
    const double lambda = z, eps = 1e-4 * lambda;
    const double fd = (dual_J(ctx, 0.0, lambda + eps, 1.0) - dual_J(ctx, 0.0, lambda - eps, 1.0)) / (2 * eps);
    EXPECT_LT(rel(marginal_dual(ctx, 0.0, lambda, 1.0), fd), 1e-4) << z;
  }
}

TEST(MarginalDual, IncreasingInLambda) {
  const auto& ctx = context();
  double prev = -1e300;
  for (double lambda = 0.3; lambda < 10.0; lambda *= 1.4) {
    const double w = marginal_dual(ctx, 2.0, lambda, 1.0);
    EXPECT_GE(w, prev);
    prev = w;
  }
}

TEST(ClassifyRegion, WeakInequality) {
  const auto& ctx = context();
  const double t = 3.0, y = 1.1, edge = ctx.boundary(t) * std::pow(y, 3.0);
  EXPECT_EQ(classify_region(ctx, t, 0.9 * edge, y), Region::JR);
  EXPECT_EQ(classify_region(ctx, t, 1.1 * edge, y), Region::NR);
  EXPECT_EQ(classify_region(ctx, t, edge, y), Region::JR);
  EXPECT_EQ(to_string(Region::NR), "NR");
}

TEST(Hjb, NoJumpRegionPde) {
  const auto& ctx = context();
  const auto r = hjb_residual(ctx, 1.0, 1.5 * ctx.boundary(1.0), 1.0);
  EXPECT_EQ(r.region, Region::NR);
  EXPECT_LE(std::abs(r.pde), 5e-3 * r.scale);
}

TEST(Hjb, JumpRegionGradient) {
  const auto& ctx = context();
  const auto r = hjb_residual(ctx, 1.0, 0.7 * ctx.boundary(1.0), 1.0);
  EXPECT_EQ(r.region, Region::JR);
  EXPECT_LE(std::abs(r.gradient), 1e-6);
}

TEST(Hjb, TerminalAndStencilGuard) {
  const auto& ctx = context();
  const auto r = hjb_residual(ctx, 30.0, 2.0, 1.0);
  EXPECT_EQ(r.pde, 0.0);
  try {
    hjb_residual(ctx, 5.0, ctx.boundary(5.0) * 1.0001, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::STENCIL_ACROSS_BOUNDARY);
  }
}

TEST(ValueMatching, ResidualShrinksWithGrid) {
  const auto c = derive_constants(baseline());
  auto worst = [&](int n) {
    ValuationContext ctx(solve_boundary(c, n));
    double w = 0;
    const auto& ts = ctx.grid().times;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      w = std::max(w, std::abs(value_matching_residual(ctx, 0.5 * (ts[i] + ts[i + 1]))));
    return w;
  };
  const double coarse = worst(16), fine = worst(64);
  EXPECT_GT(coarse, 1e-4);
  EXPECT_LT(fine, 1e-4);
  EXPECT_LT(fine, coarse / 8);
}

TEST(ValueSurface, Csv) {
  const auto& ctx = context();
  std::vector<double> ts{0.0, 10.0}, zs{0.3, 1.0, 4.0};
  std::ostringstream os;
  write_value_surface(ctx, ts, zs, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,z,Q,g");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Valuation, DomainErrors) {
  const auto& ctx = context();
  EXPECT_THROW(premium_Q(ctx, -1.0, 1.0), Error);
  EXPECT_THROW(premium_Q(ctx, 1.0, -1.0), Error);
  EXPECT_THROW(dual_J(ctx, 1.0, 0.0, 1.0), Error);
  EXPECT_THROW(marginal_dual(ctx, 1.0, 1.0, -1.0), Error);
}
