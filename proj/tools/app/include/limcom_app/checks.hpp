#pragma once

#include <functional>
#include <string>
#include <vector>

#include "limcom_app/config.hpp"

namespace limcom::app {

struct CheckResult {
  int criterion = 0;  // 0 for checks outside the numbered list
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 = none
  std::string detail;
};

struct SuiteOptions {
  int long_horizon_steps = 1024;
  double long_horizon = 200.0;
  std::size_t mc_paths = 100000;
  int mc_steps = 600;
  std::size_t invariant_paths = 1000;
  int invariant_steps = 300;
  int gradient_points = 20;
  int hjb_points = 10;
};

CheckResult check_boundary_structure(const RunConfig& cfg);
CheckResult check_boundary_value_matching(const RunConfig& cfg);
CheckResult check_infinite_horizon(const RunConfig& cfg, const SuiteOptions& opt = {});
CheckResult check_laplace_identity();
CheckResult check_duality_gradient(const RunConfig& cfg, const SuiteOptions& opt = {});
CheckResult check_fd_oracle(const RunConfig& cfg);
CheckResult check_monte_carlo(const RunConfig& cfg, const SuiteOptions& opt = {});
CheckResult check_path_invariants(const RunConfig& cfg, const SuiteOptions& opt = {});
CheckResult check_first_best(const RunConfig& cfg);
CheckResult check_homogeneity(const RunConfig& cfg);
CheckResult check_hjb(const RunConfig& cfg, const SuiteOptions& opt = {});

/// All checks in criterion order, the value-matching check last. Checks that
/// throw are reported as failures with the error text as detail.
std::vector<CheckResult> run_suite(const RunConfig& cfg, const SuiteOptions& opt = {},
                                   const std::function<void(const CheckResult&)>& on_result = {});

std::string format_line(const CheckResult& r);

}  // namespace limcom::app
