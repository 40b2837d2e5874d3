#pragma once

#include "limcom/model.hpp"

namespace limcom {

/// Standard normal distribution function, evaluated through erfc so both
/// tails keep full relative precision.
double normal_cdf(double x);

struct DFactors {
  double d1;
  double dgamma;
};

/// d^1 and d^gamma of the integral representation for elapsed time xi and
/// dual ratio z / z*(s). At xi = 0 both are +inf, 0 or -inf according to
/// whether the ratio is above, at or below one.
DFactors d_factors(double xi, double ratio, const DerivedConstants& c);

/// Closed form of int_0^inf e^{-c xi} N(d sqrt(xi)) dxi for c > 0.
double laplace_normal_integral(double c, double d);

}  // namespace limcom
