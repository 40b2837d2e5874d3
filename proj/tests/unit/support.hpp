#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "limcom/boundary.hpp"
#include "limcom/valuation.hpp"

namespace limcom::testing {

inline ModelParams baseline() { return ModelParams{}; }

inline ModelParams impatient() {
  ModelParams p;
  p.rho = 0.07;
  return p;
}

/// Solved contexts are expensive; share them between tests of one binary.
inline const ValuationContext& context(const ModelParams& p = baseline(), int n = 256) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double, double, double, double, int>,
                  std::unique_ptr<ValuationContext>>
      cache;
  std::lock_guard lock(mu);
  auto key = std::make_tuple(p.rho, p.r, p.mu, p.sigma, p.gamma, p.T, n);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<ValuationContext>(solve_boundary(derive_constants(p), n));
  return *slot;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace limcom::testing
