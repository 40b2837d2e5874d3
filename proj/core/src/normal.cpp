#include "limcom/normal.hpp"

#include <cmath>
#include <limits>

#include "limcom/error.hpp"

namespace limcom {

double normal_cdf(double x) {
  if (std::isnan(x)) throw Error(ErrorCode::DOMAIN_ERROR, "normal_cdf of NaN");
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

DFactors d_factors(double xi, double ratio, const DerivedConstants& c) {
  if (!(ratio > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "d_factors needs a positive ratio");
  if (!(xi >= 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "d_factors needs xi >= 0");
  if (xi == 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double d = ratio > 1.0 ? inf : (ratio < 1.0 ? -inf : 0.0);
    return {d, d};
  }
  const double log_ratio = std::log(ratio);
  const double denom = c.vol() * std::sqrt(xi);
  return {(log_ratio + c.drift_d1() * xi) / denom, (log_ratio + c.drift_dgamma() * xi) / denom};
}

double laplace_normal_integral(double c, double d) {
  if (!(c > 0.0)) throw Error(ErrorCode::DOMAIN_ERROR, "laplace_normal_integral needs c > 0");
  return 0.5 / c * (1.0 + d / std::sqrt(d * d + 2.0 * c));
}

}  // namespace limcom
