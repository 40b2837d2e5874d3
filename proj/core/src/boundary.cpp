#include "limcom/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom/normal.hpp"
#include "limcom/quadrature.hpp"

namespace limcom {
namespace {

// Quadrature points for the interval [k h, (k+1) h] of elapsed time. On a
// uniform grid they depend only on the offset k, so they are tabulated once.
struct OffsetPoint {
  double weight;        // includes the dxi = 2 tau dtau Jacobian
  double xi;            // elapsed time
  double disc_K;        // e^{-K xi}
  double disc_rho;      // e^{-rho_hat xi}
  double inv_scale;     // 1 / (gamma sigma sqrt(xi)), zero when xi = 0
  double shift_d1;      // drift_d1 * xi
  double shift_dgamma;  // drift_dgamma * xi
};

class BoundaryEquation {
 public:
  BoundaryEquation(const DerivedConstants& c, std::size_t n_steps, const BoundaryOptions& opt)
      : c_(c), n_(n_steps), h_(c.params.T / static_cast<double>(n_steps)), rule_(opt.rule) {
    if (rule_ == BoundaryRule::GaussSqrt) {
      const auto gl = quad::gauss_legendre(opt.gauss_points);
      per_offset_ = static_cast<std::size_t>(gl.size);
      table_.reserve(n_ * per_offset_);
      for (std::size_t k = 0; k < n_; ++k) {
        const double ta = std::sqrt(static_cast<double>(k) * h_);
        const double tb = std::sqrt(static_cast<double>(k + 1) * h_);
        const double half = 0.5 * (tb - ta), mid = 0.5 * (ta + tb);
        for (int g = 0; g < gl.size; ++g) {
          const double tau = mid + half * gl.nodes[g];
          const double xi = tau * tau;
          table_.push_back(make_point(xi, half * gl.weights[g] * 2.0 * tau));
        }
      }
    } else {
      per_offset_ = 1;
      // Node k carries the trapezoid weight of xi = k h; frac = 0 selects z*(t_{i+k}).
      for (std::size_t k = 0; k <= n_; ++k) {
        const double xi = static_cast<double>(k) * h_;
        const double w = (k == 0 || k == n_) ? 0.5 * h_ : h_;
        table_.push_back(make_point(xi, w));
      }
    }
  }

  // Residual at node i; log_z holds log z* at nodes j > i.
  double operator()(std::size_t i, double candidate, const std::vector<double>& log_z) const {
    if (i >= n_) return 0.0;
    const double lc = std::log(candidate);
    double sum_K = 0.0, sum_rho = 0.0;
    if (rule_ == BoundaryRule::GaussSqrt) {
      const double T = c_.params.T, ti = h_ * static_cast<double>(i);
      for (std::size_t k = 0; i + k < n_; ++k) {
        const std::size_t j = i + k;
        const double left = k == 0 ? lc : log_z[j];
        const double right = log_z[j + 1];
        const double tj = h_ * static_cast<double>(j);
        const double tj1 = j + 1 == n_ ? T : tj + h_;
        const OffsetPoint* p = &table_[k * per_offset_];
        for (std::size_t g = 0; g < per_offset_; ++g, ++p) {
          const double frac = interpolation_fraction(T, tj, tj1, ti + p->xi);
          const double log_ratio = lc - (left + (right - left) * frac);
          sum_K += p->weight * p->disc_K * normal_cdf((log_ratio + p->shift_dgamma) * p->inv_scale);
          sum_rho += p->weight * p->disc_rho * normal_cdf((log_ratio + p->shift_d1) * p->inv_scale);
        }
      }
    } else {
      const std::size_t last = n_ - i;
      for (std::size_t k = 0; k <= last; ++k) {
        const OffsetPoint& p = table_[k];
        const double w = (k == last) ? 0.5 * h_ : p.weight;
        if (k == 0) {
          // ratio = 1 at zero elapsed time: N(0) = 1/2.
          sum_K += w * 0.5;
          sum_rho += w * 0.5;
          continue;
        }
        const double log_ratio = lc - log_z[i + k];
        sum_K += w * p.disc_K * normal_cdf((log_ratio + p.shift_dgamma) * p.inv_scale);
        sum_rho += w * p.disc_rho * normal_cdf((log_ratio + p.shift_d1) * p.inv_scale);
      }
    }
    const double g = c_.params.gamma;
    return (std::pow(candidate, c_.power()) * sum_K - sum_rho) / (1.0 - g);
  }

 private:
  OffsetPoint make_point(double xi, double weight) const {
    OffsetPoint p{};
    p.weight = weight;
    p.xi = xi;
    p.disc_K = std::exp(-c_.K * xi);
    p.disc_rho = std::exp(-c_.rho_hat * xi);
    p.inv_scale = xi > 0.0 ? 1.0 / (c_.vol() * std::sqrt(xi)) : 0.0;
    p.shift_d1 = c_.drift_d1() * xi;
    p.shift_dgamma = c_.drift_dgamma() * xi;
    return p;
  }

  const DerivedConstants& c_;
  std::size_t n_;
  double h_;
  BoundaryRule rule_;
  std::size_t per_offset_ = 1;
  std::vector<OffsetPoint> table_;
};

BoundaryGrid solve_plain(const DerivedConstants& consts, std::size_t n, const BoundaryOptions& opt) {
  BoundaryGrid grid;
  grid.consts = consts;
  grid.options = opt;
  grid.options.richardson = false;
  grid.times.resize(n + 1);
  grid.values.assign(n + 1, 0.0);
  grid.residuals.assign(n + 1, 0.0);
  const double h = consts.params.T / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) grid.times[i] = h * static_cast<double>(i);
  grid.times[n] = consts.params.T;
  grid.values[n] = consts.z_T;

  const BoundaryEquation eq(consts, n, opt);
  std::vector<double> log_z(n + 1, 0.0);
  log_z[n] = std::log(consts.z_T);

  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = n - 1 - step;
    double lo = consts.z_inf * (1.0 + 1e-12);
    double hi = consts.z_T;
    double f_lo = eq(i, lo, log_z);
    const double f_hi = eq(i, hi, log_z);
    if (f_hi == 0.0) {
      lo = hi;
    } else if (!(f_lo * f_hi < 0.0)) {
      std::ostringstream os;
      os << "node " << i << " (t=" << grid.times[i] << "): residual " << f_lo << " at z_inf, " << f_hi
         << " at 1";
      throw Error(ErrorCode::NO_ROOT_IN_BRACKET, os.str());
    }
    while (hi - lo > opt.bracket_width) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = eq(i, mid, log_z);
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    grid.values[i] = root;
    log_z[i] = std::log(root);
    grid.residuals[i] = eq(i, root, log_z);
  }
  return grid;
}

}  // namespace

double BoundaryGrid::max_residual() const noexcept {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

BoundaryGrid solve_boundary(const DerivedConstants& consts, int n_steps, const BoundaryOptions& options) {
  if (n_steps < 8) throw Error(ErrorCode::DOMAIN_ERROR, "boundary grid needs at least 8 steps");
  if (options.gauss_points < 2 || options.gauss_points > 8) {
    throw Error(ErrorCode::DOMAIN_ERROR, "gauss_points must be in 2..8");
  }
  const auto n = static_cast<std::size_t>(n_steps);
  if (!options.richardson) return solve_plain(consts, n, options);

  BoundaryGrid coarse = solve_plain(consts, n, options);
  const BoundaryGrid fine = solve_plain(consts, 2 * n, options);
  const double order = options.rule == BoundaryRule::GaussSqrt ? 2.0 : 1.5;
  const double factor = 1.0 / (std::pow(2.0, order) - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double zf = fine.values[2 * i];
    coarse.values[i] = zf + (zf - coarse.values[i]) * factor;
    coarse.residuals[i] = fine.residuals[2 * i];
  }
  coarse.options.richardson = true;
  return coarse;
}

double boundary_residual(const BoundaryGrid& grid, std::size_t i, double candidate) {
  const std::size_t n = grid.steps();
  if (i > n) throw Error(ErrorCode::DOMAIN_ERROR, "boundary node index out of range");
  if (i == n) return 0.0;
  if (!(candidate > grid.consts.z_inf && candidate <= grid.consts.z_T)) {
    throw Error(ErrorCode::DOMAIN_ERROR, "boundary candidate outside (z_inf, 1]");
  }
  std::vector<double> log_z(n + 1);
  for (std::size_t j = 0; j <= n; ++j) log_z[j] = std::log(grid.values[j]);
  const BoundaryEquation eq(grid.consts, n, grid.options);
  return eq(i, candidate, log_z);
}

double boundary_at(const BoundaryGrid& grid, double t) {
  const double T = grid.consts.params.T;
  if (!(t >= 0.0 && t <= T)) throw Error(ErrorCode::DOMAIN_ERROR, "boundary query outside [0, T]");
  const auto& ts = grid.times;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.end()) return grid.values.back();
  const auto j = static_cast<std::size_t>(it - ts.begin());
  if (j == 0) return grid.values.front();
  const double t0 = ts[j - 1], t1 = ts[j];
  if (t == t0) return grid.values[j - 1];
  const double f = interpolation_fraction(T, t0, t1, t);
  const double l0 = std::log(grid.values[j - 1]), l1 = std::log(grid.values[j]);
  return std::exp(l0 + (l1 - l0) * f);
}

void write_boundary_csv(const BoundaryGrid& grid, std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,z_star\n" << std::setprecision(15);
  for (std::size_t i = 0; i < grid.times.size(); ++i) {
    out << grid.times[i] << ',' << grid.values[i] << '\n';
  }
}

}  // namespace limcom
