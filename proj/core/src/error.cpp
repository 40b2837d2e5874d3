#include "limcom/error.hpp"

#include <algorithm>

namespace limcom {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RATE_ORDER_VIOLATED: return "RATE_ORDER_VIOLATED";
    case ErrorCode::GAMMA_INVALID: return "GAMMA_INVALID";
    case ErrorCode::SIGMA_NONPOSITIVE: return "SIGMA_NONPOSITIVE";
    case ErrorCode::MU_NONPOSITIVE: return "MU_NONPOSITIVE";
    case ErrorCode::HORIZON_NONPOSITIVE: return "HORIZON_NONPOSITIVE";
    case ErrorCode::INCOME_NONPOSITIVE: return "INCOME_NONPOSITIVE";
    case ErrorCode::RHO_HAT_NONPOSITIVE: return "RHO_HAT_NONPOSITIVE";
    case ErrorCode::R_HAT_NONPOSITIVE: return "R_HAT_NONPOSITIVE";
    case ErrorCode::K_NONPOSITIVE: return "K_NONPOSITIVE";
    case ErrorCode::DRIFT_BELOW_HALF_VARIANCE: return "DRIFT_BELOW_HALF_VARIANCE";
    case ErrorCode::Z_INF_OUT_OF_RANGE: return "Z_INF_OUT_OF_RANGE";
    case ErrorCode::DOMAIN_ERROR: return "DOMAIN_ERROR";
    case ErrorCode::W_INFEASIBLE: return "W_INFEASIBLE";
    case ErrorCode::NO_ROOT_IN_BRACKET: return "NO_ROOT_IN_BRACKET";
    case ErrorCode::BRACKET_FAILURE: return "BRACKET_FAILURE";
    case ErrorCode::TAIL_NOT_CONVERGED: return "TAIL_NOT_CONVERGED";
    case ErrorCode::STENCIL_ACROSS_BOUNDARY: return "STENCIL_ACROSS_BOUNDARY";
    case ErrorCode::PSOR_NOT_CONVERGED: return "PSOR_NOT_CONVERGED";
    case ErrorCode::IO_ERROR: return "IO_ERROR";
    case ErrorCode::CONFIG_ERROR: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

namespace {

std::string compose(const std::vector<ErrorCode>& codes, const std::string& detail) {
  std::string msg;
  for (auto c : codes) {
    if (!msg.empty()) msg += ", ";
    msg += to_string(c);
  }
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : Error(std::vector<ErrorCode>{code}, detail) {}

Error::Error(std::vector<ErrorCode> codes, const std::string& detail)
    : std::runtime_error(compose(codes, detail)), codes_(std::move(codes)) {
  if (codes_.empty()) codes_.push_back(ErrorCode::DOMAIN_ERROR);
}

bool Error::has(ErrorCode code) const noexcept {
  return std::find(codes_.begin(), codes_.end(), code) != codes_.end();
}

}  // namespace limcom
