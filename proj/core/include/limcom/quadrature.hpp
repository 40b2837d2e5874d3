#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace limcom::quad {

/// Adaptive Simpson rule for vector-valued integrands. The error estimate
/// uses the max-norm over components; the returned value includes the
/// Richardson correction (S2 - S1) / 15.
template <std::size_t N>
class AdaptiveSimpson {
 public:
  using Value = std::array<double, N>;

  AdaptiveSimpson(double tol, int max_depth = 40) : tol_(tol), max_depth_(max_depth) {}

  template <class F>
  Value integrate(F&& f, double a, double b) {
    const double m = 0.5 * (a + b);
    const Value fa = f(a), fm = f(m), fb = f(b);
    const Value whole = simpson(a, b, fa, fm, fb);
    return refine(f, a, b, fa, fm, fb, whole, tol_, max_depth_);
  }

  /// Number of subintervals that hit the depth limit without converging.
  int unresolved() const noexcept { return unresolved_; }

 private:
  static Value simpson(double a, double b, const Value& fa, const Value& fm, const Value& fb) {
    Value out;
    const double h6 = (b - a) / 6.0;
    for (std::size_t k = 0; k < N; ++k) out[k] = h6 * (fa[k] + 4.0 * fm[k] + fb[k]);
    return out;
  }

  template <class F>
  Value refine(F& f, double a, double b, const Value& fa, const Value& fm, const Value& fb,
               const Value& whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const Value flm = f(0.5 * (a + m));
    const Value frm = f(0.5 * (m + b));
    const Value left = simpson(a, m, fa, flm, fm);
    const Value right = simpson(m, b, fm, frm, fb);
    double err = 0.0;
    Value sum;
    for (std::size_t k = 0; k < N; ++k) {
      sum[k] = left[k] + right[k];
      err = std::max(err, std::abs(sum[k] - whole[k]));
    }
    if (err <= 15.0 * tol || depth <= 0) {
      if (err > 15.0 * tol) ++unresolved_;
      for (std::size_t k = 0; k < N; ++k) sum[k] += (sum[k] - whole[k]) / 15.0;
      return sum;
    }
    const Value l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    const Value r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    for (std::size_t k = 0; k < N; ++k) sum[k] = l[k] + r[k];
    return sum;
  }

  double tol_;
  int max_depth_;
  int unresolved_ = 0;
};

/// Scalar adaptive Simpson.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
  AdaptiveSimpson<1> rule(tol, max_depth);
  return rule.integrate([&](double x) { return std::array<double, 1>{f(x)}; }, a, b)[0];
}

/// Gauss-Legendre rule on [-1, 1] with n points (n in 2..8).
struct GaussRule {
  std::array<double, 8> nodes{};
  std::array<double, 8> weights{};
  int size = 0;
};

GaussRule gauss_legendre(int n);

}  // namespace limcom::quad
