#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom/valuation.hpp"
#include "limcom/vi_oracle.hpp"
#include "support.hpp"

using namespace limcom;
using limcom::testing::context;
using limcom::testing::baseline;

namespace {

const FDSolution& baseline_fd() {
  static const FDSolution sol = [] {
    const auto c = derive_constants(baseline());
    return solve_vi_fd(c, FDOptions::defaults_for(c));
  }();
  return sol;
}

}  // namespace

TEST(FdOracle, TerminalSliceAndStoppedRegion) {
  const auto& fd = baseline_fd();
  const std::size_t nt = fd.times.size() - 1;
  for (std::size_t j = 0; j < fd.zeta.size() - 1; ++j) EXPECT_EQ(fd.at(nt, j), 0.0);
  const double lz = std::log(fd.consts.z_inf);
  for (std::size_t k = 0; k <= nt; ++k) {
    for (std::size_t j = 0; j < fd.zeta.size() && fd.zeta[j] <= lz; ++j) EXPECT_LE(std::abs(fd.at(k, j)), 1e-8);
  }
}

TEST(FdOracle, AgreesWithIntegralRepresentation) {
  const auto& fd = baseline_fd();
  const auto& ctx = context();
  double max_q = 0, worst = 0;
  for (double q : fd.q) max_q = std::max(max_q, q);
  for (std::size_t k = 0; k + 1 < fd.times.size(); k += 20) {
    for (std::size_t j = 1; j + 1 < fd.zeta.size(); j += 3) {
      worst = std::max(worst, std::abs(fd.at(k, j) - premium_Q(ctx, fd.times[k], std::exp(fd.zeta[j]))));
    }
  }
  EXPECT_LE(worst, 1e-2 * max_q);
}

TEST(FdBoundary, Bounds) {
  const auto& fd = baseline_fd();
  const auto bd = fd_boundary(fd);
  const auto& ctx = context();
  const double dz = fd.d_space();
  EXPECT_NEAR(std::log(bd.back()), 0.0, dz);
  for (std::size_t k = 0; k < bd.size(); ++k) {
    EXPECT_GE(std::log(bd[k]), std::log(fd.consts.z_inf) - dz);
    EXPECT_LE(std::abs(std::log(bd[k]) - std::log(ctx.boundary(fd.times[k]))), 2 * dz) << fd.times[k];
    if (k > 0) EXPECT_GE(bd[k], bd[k - 1]);
  }
}

TEST(Complementarity, Residuals) {
  const auto rep = complementarity_report(baseline_fd());
  EXPECT_GT(rep.continuation_nodes, 0u);
  EXPECT_GT(rep.stopped_nodes, 0u);
  EXPECT_EQ(rep.nodes, rep.continuation_nodes + rep.stopped_nodes);
  EXPECT_LE(rep.max_continuation_residual, 1e-6);
  EXPECT_GE(rep.min_stopped_residual, -1e-8);
  EXPECT_LE(rep.max_min_form, 1e-6);
  EXPECT_LE(rep.quantile_50, rep.quantile_99);
}

TEST(FdOracle, FullyImplicitAlsoAgrees) {
  const auto c = derive_constants(baseline());
  auto o = FDOptions::defaults_for(c);
  o.theta = 1.0;
  o.n_time = 200;
  o.n_space = 200;
  const auto fd = solve_vi_fd(c, o);
  const auto& ctx = context();
  const std::size_t j = fd.zeta.size() / 2;
  EXPECT_NEAR(fd.at(0, j), premium_Q(ctx, 0.0, std::exp(fd.zeta[j])), 1e-2);
}

TEST(FdOracle, RejectsBadOptions) {
  const auto c = derive_constants(baseline());
  auto o = FDOptions::defaults_for(c);
  o.zeta_min = std::log(c.z_inf);
  EXPECT_THROW(solve_vi_fd(c, o), Error);
  o = FDOptions::defaults_for(c);
  o.theta = 0.3;
  EXPECT_THROW(solve_vi_fd(c, o), Error);
  o = FDOptions::defaults_for(c);
  o.omega = 2.0;
  EXPECT_THROW(solve_vi_fd(c, o), Error);
}

TEST(FdCsv, Headers) {
  const auto c = derive_constants(baseline());
  auto o = FDOptions::defaults_for(c);
  o.n_time = o.n_space = 50;
  const auto fd = solve_vi_fd(c, o);
  std::ostringstream a, b;
  write_fd_csv(fd, a);
  write_fd_boundary_csv(fd, fd_boundary(fd), b, "h");
  EXPECT_EQ(a.str().substr(0, 13), "t,zeta,Q_hat\n");
  EXPECT_EQ(b.str().substr(0, 10), "# h\nt,z_fd");
}
