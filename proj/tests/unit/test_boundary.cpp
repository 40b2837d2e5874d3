#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "limcom/boundary.hpp"
#include "limcom/error.hpp"
#include "support.hpp"

using namespace limcom;
using limcom::testing::context;
using limcom::testing::baseline;

TEST(Boundary, BaselineStructure) {
  const auto& grid = context().grid();
  const auto c = derive_constants(baseline());
  ASSERT_EQ(grid.values.size(), 257u);
  EXPECT_EQ(grid.values.back(), 1.0);
  EXPECT_EQ(grid.times.back(), 30.0);
  for (std::size_t i = 0; i + 1 < grid.values.size(); ++i) {
    EXPECT_GT(grid.values[i], c.z_inf);
    EXPECT_LT(grid.values[i], 1.0);
    EXPECT_LT(grid.values[i], grid.values[i + 1]);
  }
  EXPECT_LE(grid.max_residual(), 1e-9);
}

TEST(Boundary, TerminalValueForOtherParameters) {
  ModelParams p = limcom::testing::impatient();
  p.T = 5;
  const auto grid = solve_boundary(derive_constants(p), 64);
  EXPECT_EQ(grid.values.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(grid.values.begin(), grid.values.end()));
}

TEST(Boundary, SecondOrderConvergence) {
  const auto c = derive_constants(baseline());
  const double z64 = solve_boundary(c, 64).values[0];
  const double z128 = solve_boundary(c, 128).values[0];
  const double z256 = context().grid().values[0];
  const double ratio = (z128 - z64) / (z256 - z128);
  EXPECT_NEAR(std::log2(ratio), 2.0, 0.3);
  EXPECT_NEAR(z256, 0.4828732, 2e-7);
}

TEST(Boundary, RichardsonMatchesFineGrid) {
  const auto c = derive_constants(baseline());
  BoundaryOptions o;
  o.richardson = true;
  const auto rich = solve_boundary(c, 128, o);
  const auto fine = solve_boundary(c, 1024);
  EXPECT_NEAR(rich.values[0], fine.values[0], 2e-8);
}

TEST(Boundary, TrapezoidRuleConvergesToSameBoundary) {
  const auto c = derive_constants(baseline());
  BoundaryOptions o;
  o.rule = BoundaryRule::Trapezoid;
  const auto trap = solve_boundary(c, 512, o);
  EXPECT_NEAR(trap.values[0], context().grid().values[0], 5e-5);
  EXPECT_EQ(trap.values.back(), 1.0);
}

TEST(Boundary, LongHorizonApproachesInfiniteLimit) {
  ModelParams p;
  p.T = 200;
  const auto c = derive_constants(p);
  const auto grid = solve_boundary(c, 1024);
  EXPECT_NEAR(grid.values[0], c.z_inf, 1e-3);
  EXPECT_GT(grid.values[0], c.z_inf);
}

TEST(Boundary, TooFewSteps) { EXPECT_THROW(solve_boundary(derive_constants(baseline()), 4), Error); }

TEST(BoundaryResidual, RootAndSigns) {
  const auto& grid = context().grid();
  const auto c = derive_constants(baseline());
  EXPECT_LE(std::abs(boundary_residual(grid, 0, grid.values[0])), 1e-9);
  EXPECT_EQ(boundary_residual(grid, grid.steps(), 0.7), 0.0);
  EXPECT_EQ(boundary_residual(grid, grid.steps(), 0.2), 0.0);
  // bracketing scan over (z_inf, 1) at node 0: exactly one sign change
  int changes = 0;
  double prev = boundary_residual(grid, 0, c.z_inf * (1 + 1e-9));
  for (int k = 1; k <= 200; ++k) {
    const double z = c.z_inf + (1 - c.z_inf) * k / 200.0 * (1 - 1e-9);
    const double cur = boundary_residual(grid, 0, z);
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }
  EXPECT_EQ(changes, 1);
}

TEST(BoundaryAt, NodesAndInterpolation) {
  const auto& grid = context().grid();
  EXPECT_EQ(boundary_at(grid, 30.0), 1.0);
  for (std::size_t i : {0u, 17u, 128u, 255u}) EXPECT_EQ(boundary_at(grid, grid.times[i]), grid.values[i]);
  for (std::size_t i : {0u, 100u, 255u}) {
    const double mid = boundary_at(grid, 0.5 * (grid.times[i] + grid.times[i + 1]));
    EXPECT_GT(mid, grid.values[i]);
    EXPECT_LT(mid, grid.values[i + 1]);
  }
  EXPECT_THROW(boundary_at(grid, -0.1), Error);
  EXPECT_THROW(boundary_at(grid, 30.5), Error);
}

TEST(BoundaryAt, InterpolationFraction) {
  EXPECT_EQ(interpolation_fraction(10, 2, 4, 2), 0.0);
  EXPECT_EQ(interpolation_fraction(10, 2, 4, 4), 1.0);
  EXPECT_NEAR(interpolation_fraction(10, 9, 10, 9.75), 0.5, 1e-15);
  EXPECT_NEAR(interpolation_fraction(1e6, 0, 1, 0.5), 0.5, 1e-6);  // far from T: linear in t
}

TEST(BoundaryCsv, HeaderAndRows) {
  std::ostringstream os;
  write_boundary_csv(context().grid(), os, "config_hash=abc");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# config_hash=abc");
  std::getline(in, line);
  EXPECT_EQ(line, "t,z_star");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) ++rows, last = line;
  EXPECT_EQ(rows, 257);
  EXPECT_EQ(last, "30,1");
}
