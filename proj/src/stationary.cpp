#include "rankdiff/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rankdiff/csv.hpp"
#include "rankdiff/quadrature.hpp"

namespace rankdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a/(2B); nonpositive B maps to +inf so a bad evaluation poisons the
// quadrature instead of silently flipping sign.
struct DriftRatio {
  const CoefficientModel* m;
  double operator()(double v) const {
    const double den = 2.0 * m->B(v);
    if (!(den > 0.0)) return kInf;
    return m->a(v) / den;
  }
};

} // namespace

void require_stationary_family(const CoefficientModel& m) {
  constexpr int kProbe = 64; // even, so u = 1/2 is probed
  double bmin = kInf;
  for (int k = 1; k < kProbe; ++k)
    bmin = std::min(bmin, m.B(static_cast<double>(k) / kProbe));
  const double scale = std::max(1.0, std::abs(m.B(0.5)));
  if (!(bmin > 0.0) || std::abs(m.B(1.0)) > 1e-9 * scale)
    throw std::domain_error("no stationary family: need B > 0 inside (0,1) "
                            "and B(1) = 0 (model " +
                            m.name + ")");
}

double StationaryProfile::psi(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("psi: u must be inside (0,1)");
  DriftRatio r{model};
  // nearest table node, then a short signed quadrature from it
  std::size_t k;
  const auto it = std::lower_bound(grid.begin(), grid.end(), u);
  if (it == grid.end()) {
    k = grid.size() - 1;
  } else {
    k = static_cast<std::size_t>(it - grid.begin());
    if (k > 0 && u - grid[k - 1] < grid[k] - u) --k;
  }
  if (u == grid[k]) return psi_val[k];
  return psi_val[k] + quad::integrate(r, grid[k], u, 1e-13, 1e-13, 256).value;
}

double StationaryProfile::psi_inverse(double x, double tol) const {
  if (!std::isfinite(x))
    throw std::invalid_argument("psi_inverse: x must be finite");
  if (finite_at_zero && x <= psi_limit_zero) return 0.0;
  if (finite_at_one && x >= psi_limit_one) return 1.0;
  double lo, hi;
  if (x < psi_val.front()) {
    // walk geometrically toward 0 until Psi drops below x
    hi = grid.front();
    lo = hi;
    double flo = psi_val.front();
    for (int k = 0; k < 300 && flo > x; ++k) {
      lo *= 0.25;
      if (lo < 1e-300) return 0.0;
      flo = psi(lo);
    }
    if (flo > x) return 0.0;
  } else if (x > psi_val.back()) {
    lo = grid.back();
    hi = lo;
    double fhi = psi_val.back();
    for (int k = 0; k < 300 && fhi < x; ++k) {
      hi = 1.0 - 0.25 * (1.0 - hi);
      if (1.0 - hi < 1e-17) return 1.0;
      fhi = psi(hi);
    }
    if (fhi < x) return 1.0;
  } else {
    const auto it = std::lower_bound(psi_val.begin(), psi_val.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - psi_val.begin());
    if (k == 0) return grid.front();
    lo = grid[k - 1];
    hi = grid[k];
  }
  // bisection on the bracket; Psi is strictly increasing there
  for (int it2 = 0; it2 < 200; ++it2) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = psi(mid);
    if (std::abs(fm - x) <= tol) return mid;
    if (fm < x)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

QuantileProfile StationaryProfile::quantile_profile(double xbar) const {
  std::vector<double> vals(psi_val.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = psi_val[i] - xbar;
  return make_profile(grid, std::move(vals),
                      finite_at_zero ? EndpointBehavior::Clamped
                                     : EndpointBehavior::Divergent,
                      finite_at_one ? EndpointBehavior::Clamped
                                    : EndpointBehavior::Divergent);
}

std::shared_ptr<const StationaryProfile> build_stationary(
    const CoefficientModel& m, std::size_t grid_count) {
  require_stationary_family(m);
  if (grid_count < 64)
    throw std::invalid_argument("build_stationary: grid_count < 64");
  auto prof = std::make_shared<StationaryProfile>();
  prof->model = &m;
  prof->grid = clustered_unit_grid(grid_count);
  const auto& g = prof->grid;
  const std::size_t n = g.size();
  prof->psi_val.assign(n, 0.0);
  DriftRatio r{&m};
  const auto seg = [&r](double a, double b) {
    return quad::integrate(r, a, b, 1e-13, 1e-13, 256).value;
  };
  // cumulative sweeps outward from the exact anchor Psi(1/2) = 0
  const std::size_t j0 =
      static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.5) -
                               g.begin());
  double acc = seg(0.5, g[j0]);
  prof->psi_val[j0] = acc;
  for (std::size_t k = j0 + 1; k < n; ++k) {
    acc += seg(g[k - 1], g[k]);
    prof->psi_val[k] = acc;
  }
  if (j0 > 0) {
    acc = seg(0.5, g[j0 - 1]); // negative: runs downward
    prof->psi_val[j0 - 1] = acc;
    for (std::size_t k = j0 - 1; k-- > 0;) {
      acc += seg(g[k + 1], g[k]);
      prof->psi_val[k] = acc;
    }
  }
  const auto t0 = quad::integrate_to_endpoint(r, g.front(), 0.0, 1e-10);
  if (t0.status == quad::TailStatus::Converged) {
    prof->finite_at_zero = true;
    prof->psi_limit_zero = prof->psi_val.front() + t0.value;
  }
  const auto t1 = quad::integrate_to_endpoint(r, g.back(), 1.0, 1e-10);
  if (t1.status == quad::TailStatus::Converged) {
    prof->finite_at_one = true;
    prof->psi_limit_one = prof->psi_val.back() + t1.value;
  }
  prof->first_abs_moment = stationary_first_moment(m);
  return prof;
}

double psi(const CoefficientModel& m, double u, double tol) {
  require_stationary_family(m);
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("psi: u must be inside (0,1)");
  DriftRatio r{&m};
  const double qtol = std::max(tol * 1e-2, 1e-14);
  return quad::integrate(r, 0.5, u, qtol, qtol, 8192).value;
}

double psi_inverse(const CoefficientModel& m, double x, double tol) {
  return build_stationary(m)->psi_inverse(x, tol);
}

std::function<double(double)> stationary_cdf(const CoefficientModel& m,
                                             double xbar) {
  auto prof = build_stationary(m);
  return [prof, xbar](double x) { return prof->psi_inverse(x + xbar); };
}

double stationary_first_moment(const CoefficientModel& m) {
  const auto left = [&m](double u) {
    const double den = 2.0 * std::abs(m.B(u));
    if (den == 0.0) return kInf;
    return m.a(u) * u / den;
  };
  const auto right = [&m](double u) {
    const double den = 2.0 * std::abs(m.B(u));
    if (den == 0.0) return kInf;
    return m.a(u) * (1.0 - u) / den;
  };
  const auto lr = quad::integrate_to_endpoint(left, 0.5, 0.0, 1e-9);
  const auto rr = quad::integrate_to_endpoint(right, 0.5, 1.0, 1e-9);
  if (lr.status == quad::TailStatus::Converged &&
      rr.status == quad::TailStatus::Converged)
    return rr.value - lr.value; // lr runs downward, so its sign is flipped
  return kInf;
}

double centering_offset(const CoefficientModel& m,
                        const std::function<double(double)>& quantile_of_F0) {
  const auto prof = build_stationary(m);
  const auto h = [&](double u) { return prof->psi(u) - quantile_of_F0(u); };
  const auto lt = quad::integrate_to_endpoint(h, 0.5, 0.0, 1e-9);
  const auto rt = quad::integrate_to_endpoint(h, 0.5, 1.0, 1e-9);
  if (lt.status != quad::TailStatus::Converged ||
      rt.status != quad::TailStatus::Converged)
    throw std::domain_error(
        "centering_offset: the mean-matching integral does not converge");
  return rt.value - lt.value;
}

HardyReport hardy_poincare_check(const CoefficientModel& m) {
  require_stationary_family(m);
  DriftRatio r{&m};
  const auto q = [&r](double v) {
    const double x = r(v);
    return x * x;
  };
  constexpr int kLevels[3] = {8, 12, 16};
  const auto seg = [&q](double a, double b) {
    return quad::integrate(q, a, b, 1e-12, 1e-8, 2048).value;
  };
  HardyReport rep;
  // right side: u_j = 1 - 2^{-j-1}, running sup of (1-u_j) * int_{1/2}^{u_j}
  {
    double cum = 0.0, prev = 0.5, sup = 0.0;
    for (int j = 1; j <= kLevels[2]; ++j) {
      const double u = 1.0 - std::ldexp(1.0, -j - 1);
      cum += seg(prev, u);
      prev = u;
      sup = std::max(sup, (1.0 - u) * cum);
      for (int t = 0; t < 3; ++t)
        if (j == kLevels[t]) rep.sup_right[t] = sup;
    }
  }
  // left side: u_j = 2^{-j-1}, running sup of u_j * int_{u_j}^{1/2}
  {
    double cum = 0.0, prev = 0.5, sup = 0.0;
    for (int j = 1; j <= kLevels[2]; ++j) {
      const double u = std::ldexp(1.0, -j - 1);
      cum += seg(u, prev);
      prev = u;
      sup = std::max(sup, u * cum);
      for (int t = 0; t < 3; ++t)
        if (j == kLevels[t]) rep.sup_left[t] = sup;
    }
  }
  const auto side = [](const double s[3]) {
    // refining 8 more levels toward the endpoint barely moves the sup:
    // the weighted Hardy quantity is finite
    if (s[2] <= s[1] * 1.001 + 1e-12 && s[1] <= s[0] * 1.01 + 1e-12)
      return HardyVerdict::Satisfied;
    const double tiny = 1e-300;
    if (s[2] >= 1.5 * std::max(s[1], tiny) &&
        s[1] >= 1.5 * std::max(s[0], tiny))
      return HardyVerdict::Violated;
    return HardyVerdict::Undetermined;
  };
  const HardyVerdict vl = side(rep.sup_left);
  const HardyVerdict vr = side(rep.sup_right);
  if (vl == HardyVerdict::Violated || vr == HardyVerdict::Violated)
    rep.verdict = HardyVerdict::Violated;
  else if (vl == HardyVerdict::Satisfied && vr == HardyVerdict::Satisfied)
    rep.verdict = HardyVerdict::Satisfied;
  else
    rep.verdict = HardyVerdict::Undetermined;
  return rep;
}

double degenerate_family_cdf(double h, double x) {
  if (!(h >= 0.0) || !std::isfinite(h))
    throw std::invalid_argument("degenerate_family_cdf: h must be >= 0");
  const double s = 1.0 / std::sqrt(2.0); // half-width of each parabolic cap
  if (x <= -s) return 0.0;
  if (x < 0.0) return 0.5 - x * x;
  if (x <= h) return 0.5;
  if (x < h + s) return 0.5 + (x - h) * (x - h);
  return 1.0;
}

double BumpTestFn::operator()(double x) const {
  const double z = (x - center) / width;
  const double q = 1.0 - z * z;
  if (q < 1e-3) return 0.0; // exp(-1/q) underflows anyway
  return std::exp(-1.0 / q);
}

double BumpTestFn::d1(double x) const {
  const double z = (x - center) / width;
  const double q = 1.0 - z * z;
  if (q < 1e-3) return 0.0;
  return std::exp(-1.0 / q) * (-2.0 * z / (q * q)) / width;
}

double BumpTestFn::d2(double x) const {
  const double z = (x - center) / width;
  const double q = 1.0 - z * z;
  if (q < 1e-3) return 0.0;
  const double z2 = z * z;
  const double q2 = q * q;
  return std::exp(-1.0 / q) * (6.0 * z2 * z2 - 2.0) / (q2 * q2) /
         (width * width);
}

std::vector<BumpTestFn> make_bump_family(std::size_t count, double lo,
                                         double hi) {
  if (count == 0 || !(hi > lo))
    throw std::invalid_argument("make_bump_family: need count >= 1, hi > lo");
  const double spacing = (hi - lo) / static_cast<double>(count);
  std::vector<BumpTestFn> fns;
  fns.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    fns.push_back({lo + (static_cast<double>(j) + 0.5) * spacing,
                   2.0 * spacing}); // overlapping supports, no gaps
  return fns;
}

void write_psi_csv(const StationaryProfile& prof, const std::string& path) {
  csv::Writer w(path, {"u", "psi"});
  for (std::size_t i = 0; i < prof.grid.size(); ++i)
    w.row({csv::fmt(prof.grid[i]), csv::fmt(prof.psi_val[i])});
}

void write_stationary_cdf_csv(const StationaryProfile& prof, double xbar,
                              double x_lo, double x_hi, std::size_t count,
                              const std::string& path) {
  if (count < 2 || !(x_hi > x_lo))
    throw std::invalid_argument("write_stationary_cdf_csv: bad grid");
  csv::Writer w(path, {"x", "F_inf"});
  const double dx = (x_hi - x_lo) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = x_lo + static_cast<double>(j) * dx;
    w.row({csv::fmt(x), csv::fmt(prof.psi_inverse(x + xbar))});
  }
}

double stationary_residual(const CoefficientModel& m,
                           const std::function<double(double)>& F,
                           std::span<const BumpTestFn> fns) {
  double worst = 0.0;
  for (const auto& fn : fns) {
    const auto integrand = [&](double x) {
      const double u = std::clamp(F(x), 0.0, 1.0);
      return 0.5 * m.A(u) * fn.d2(x) + m.B(u) * fn.d1(x);
    };
    const auto r = quad::integrate(integrand, fn.center - fn.width,
                                   fn.center + fn.width, 1e-10, 1e-10, 8192);
    worst = std::max(worst, std::abs(r.value));
  }
  return worst;
}

} // namespace rankdiff
