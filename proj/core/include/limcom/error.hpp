#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace limcom {

enum class ErrorCode {
  // Parameter assumptions.
  RATE_ORDER_VIOLATED,      // requires 0 < r <= rho
  GAMMA_INVALID,            // requires gamma > 0, gamma != 1
  SIGMA_NONPOSITIVE,
  MU_NONPOSITIVE,
  HORIZON_NONPOSITIVE,
  INCOME_NONPOSITIVE,
  RHO_HAT_NONPOSITIVE,
  R_HAT_NONPOSITIVE,
  K_NONPOSITIVE,
  DRIFT_BELOW_HALF_VARIANCE,  // requires mu > sigma^2 / 2
  Z_INF_OUT_OF_RANGE,
  // Runtime failures.
  DOMAIN_ERROR,
  W_INFEASIBLE,
  NO_ROOT_IN_BRACKET,
  BRACKET_FAILURE,
  TAIL_NOT_CONVERGED,
  STENCIL_ACROSS_BOUNDARY,
  PSOR_NOT_CONVERGED,
  IO_ERROR,
  CONFIG_ERROR,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one or more named violations. The first code is the
/// primary one; parameter validation reports every failed assumption.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  Error(std::vector<ErrorCode> codes, const std::string& detail);

  ErrorCode code() const noexcept { return codes_.front(); }
  const std::vector<ErrorCode>& codes() const noexcept { return codes_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<ErrorCode> codes_;
};

}  // namespace limcom
