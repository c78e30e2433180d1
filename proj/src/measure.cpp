#include "rankdiff/measure.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rankdiff/csv.hpp"
#include "rankdiff/quadrature.hpp"

namespace rankdiff {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

} // namespace

StepCDF StepCDF::from_atoms(std::vector<double> location,
                            std::vector<double> mass) {
  require(!location.empty(), "StepCDF: no atoms");
  require(location.size() == mass.size(), "StepCDF: size mismatch");
  StepCDF m;
  m.location = std::move(location);
  m.mass = std::move(mass);
  m.cumulative.resize(m.mass.size());
  double run = 0.0;
  for (std::size_t i = 0; i < m.mass.size(); ++i) {
    require(std::isfinite(m.location[i]), "StepCDF: non-finite location");
    require(m.mass[i] > 0.0, "StepCDF: masses must be positive");
    require(i == 0 || m.location[i] > m.location[i - 1],
            "StepCDF: locations must be strictly increasing");
    run += m.mass[i];
    m.cumulative[i] = run;
  }
  require(std::abs(run - 1.0) <= 1e-12, "StepCDF: masses must sum to 1");
  return m;
}

StepCDF StepCDF::from_samples(std::span<const double> xs) {
  require(!xs.empty(), "StepCDF: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double w = 1.0 / static_cast<double>(sorted.size());
  std::vector<double> loc, mass;
  loc.reserve(sorted.size());
  mass.reserve(sorted.size());
  for (double x : sorted) {
    if (!loc.empty() && x == loc.back())
      mass.back() += w;
    else {
      loc.push_back(x);
      mass.push_back(w);
    }
  }
  // re-sum to keep the total at 1 within the constructor tolerance
  return from_atoms(std::move(loc), std::move(mass));
}

double StepCDF::cdf(double x) const {
  const auto it = std::upper_bound(location.begin(), location.end(), x);
  if (it == location.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - location.begin()) - 1];
}

double StepCDF::quantile(double u) const {
  require(u >= 0.0 && u < 1.0, "StepCDF::quantile: u outside [0,1)");
  // first atom whose cumulative mass strictly exceeds u
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return location.back();
  return location[static_cast<std::size_t>(it - cumulative.begin())];
}

double quantile(const StepCDF& m, double u) { return m.quantile(u); }
double quantile(const QuantileProfile& f, double u) { return f(u); }

QuantileProfile make_profile(std::vector<double> grid,
                             std::vector<double> value,
                             EndpointBehavior at_zero,
                             EndpointBehavior at_one) {
  require(grid.size() >= 2, "QuantileProfile: need at least two grid points");
  require(grid.size() == value.size(), "QuantileProfile: size mismatch");
  require(grid.front() > 0.0 && grid.back() < 1.0,
          "QuantileProfile: grid must lie inside (0,1)");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1],
            "QuantileProfile: grid must be strictly increasing");
  for (std::size_t i = 1; i < value.size(); ++i) {
    if (value[i] < value[i - 1]) {
      // tolerate round-off wobble, reject real decreases
      const double slack = 1e-9 * std::max(1.0, std::abs(value[i - 1]));
      require(value[i - 1] - value[i] <= slack,
              "QuantileProfile: values must be nondecreasing");
      value[i] = value[i - 1];
    }
  }
  QuantileProfile f;
  f.grid = std::move(grid);
  f.value = std::move(value);
  f.at_zero = at_zero;
  f.at_one = at_one;
  return f;
}

double QuantileProfile::operator()(double u) const {
  assert(!grid.empty());
  if (u <= grid.front()) {
    if (at_zero == EndpointBehavior::Clamped) return value.front();
    const double slope =
        (value[1] - value[0]) / (grid[1] - grid[0]);
    return value.front() + (u - grid.front()) * slope;
  }
  if (u >= grid.back()) {
    if (at_one == EndpointBehavior::Clamped) return value.back();
    const std::size_t n = grid.size();
    const double slope =
        (value[n - 1] - value[n - 2]) / (grid[n - 1] - grid[n - 2]);
    return value.back() + (u - grid.back()) * slope;
  }
  const auto it = std::upper_bound(grid.begin(), grid.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  const double t = (u - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return value[k - 1] + t * (value[k] - value[k - 1]);
}

std::vector<double> clustered_unit_grid(std::size_t count) {
  require(count >= 2, "clustered_unit_grid: count too small");
  std::vector<double> u(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double theta =
        std::numbers::pi * static_cast<double>(k + 1) /
        static_cast<double>(count + 1);
    const double s = std::sin(0.5 * theta);
    u[k] = s * s;
  }
  return u;
}

QuantileProfile tabulate_quantile(const std::function<double(double)>& finv,
                                  std::size_t count,
                                  EndpointBehavior at_zero,
                                  EndpointBehavior at_one) {
  auto grid = clustered_unit_grid(count);
  std::vector<double> value(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    value[i] = finv(grid[i]);
    require(std::isfinite(value[i]),
            "tabulate_quantile: non-finite quantile value");
  }
  return make_profile(std::move(grid), std::move(value), at_zero, at_one);
}

double wasserstein_pp_quantile(const StepCDF& F, const StepCDF& G, double p) {
  require(p >= 1.0, "wasserstein_pp_quantile: p must be >= 1");
  // quantile gap is constant between consecutive cumulative breakpoints
  double total = 0.0;
  double ulo = 0.0;
  std::size_t i = 0, j = 0;
  while (i < F.size() && j < G.size()) {
    const double cf = F.cumulative[i];
    const double cg = G.cumulative[j];
    const double next = std::min(cf, cg);
    if (next > ulo)
      total += (next - ulo) * std::pow(std::abs(F.location[i] - G.location[j]), p);
    ulo = next;
    if (cf == next) ++i;
    if (cg == next) ++j;
  }
  return total;
}

namespace {

// Geometrically refined midpoint contribution of [0, h] (mirrored for the
// right endpoint) for profile pairs with divergent tails.  Returns +inf when
// the panel sums keep growing.
double endpoint_refined(const QuantileProfile& F, const QuantileProfile& G,
                        double p, double h, bool left, double scale_hint) {
  double total = 0.0;
  double w = h;
  double prev = std::numeric_limits<double>::infinity();
  int grow_streak = 0;
  for (int level = 0; level < 2000; ++level) {
    const double width = 0.5 * w;
    const double mu = left ? 0.75 * w : 1.0 - 0.75 * w;
    const double inc = std::pow(std::abs(F(mu) - G(mu)), p) * width;
    total += inc;
    if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
    grow_streak = (inc > prev) ? grow_streak + 1 : 0;
    if (grow_streak >= 5) return std::numeric_limits<double>::infinity();
    if (inc <= 1e-13 * std::max(scale_hint, total) || width < 1e-300)
      return total;
    prev = inc;
    w = width;
  }
  return total;
}

} // namespace

double wasserstein_pp_quantile(const QuantileProfile& F,
                               const QuantileProfile& G, double p,
                               std::size_t n_quad) {
  require(p >= 1.0, "wasserstein_pp_quantile: p must be >= 1");
  require(n_quad >= 16, "wasserstein_pp_quantile: n_quad too small");
  const double h = 1.0 / static_cast<double>(n_quad);
  const bool refine_left = F.at_zero == EndpointBehavior::Divergent ||
                           G.at_zero == EndpointBehavior::Divergent;
  const bool refine_right = F.at_one == EndpointBehavior::Divergent ||
                            G.at_one == EndpointBehavior::Divergent;
  double total = 0.0;
  const std::size_t k_lo = refine_left ? 1 : 0;
  const std::size_t k_hi = refine_right ? n_quad - 1 : n_quad;
  for (std::size_t k = k_lo; k < k_hi; ++k) {
    const double u = (static_cast<double>(k) + 0.5) * h;
    total += std::pow(std::abs(F(u) - G(u)), p) * h;
  }
  if (refine_left) total += endpoint_refined(F, G, p, h, true, total);
  if (refine_right) total += endpoint_refined(F, G, p, h, false, total);
  return total;
}

double wasserstein_pp_sorted(std::span<const double> x,
                             std::span<const double> y, double p,
                             ExecPolicy pol) {
  require(p >= 1.0, "wasserstein_pp_sorted: p must be >= 1");
  require(x.size() == y.size() && !x.empty(),
          "wasserstein_pp_sorted: samples must be non-empty and equal size");
  const std::size_t n = x.size();
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  std::vector<double> gap(n);
  const bool par = (pol == ExecPolicy::Parallel);
#pragma omp parallel for if (par) schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    gap[static_cast<std::size_t>(i)] =
        std::pow(std::abs(xs[static_cast<std::size_t>(i)] -
                          ys[static_cast<std::size_t>(i)]),
                 p);
  const double sorted_mean = block_sum(gap, pol) / static_cast<double>(n);
#ifndef NDEBUG
  double unsorted = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    unsorted += std::pow(std::abs(x[i] - y[i]), p);
  unsorted /= static_cast<double>(n);
  assert(sorted_mean <= unsorted + 1e-12 * (1.0 + unsorted));
#endif
  return sorted_mean;
}

double wasserstein_pp_samples_vs_profile(std::span<const double> x,
                                         const QuantileProfile& f, double p) {
  require(p >= 1.0, "wasserstein_pp_samples_vs_profile: p must be >= 1");
  require(!x.empty(), "wasserstein_pp_samples_vs_profile: empty sample");
  const std::size_t n = x.size();
  std::vector<double> xs(x.begin(), x.end());
  std::sort(xs.begin(), xs.end());
  std::vector<double> panel(n);
  const double h = 1.0 / static_cast<double>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double y = xs[k];
    const auto integrand = [&f, y, p](double u) {
      return std::pow(std::abs(y - f(u)), p);
    };
    panel[k] = quad::integrate(integrand, static_cast<double>(k) * h,
                               static_cast<double>(k + 1) * h, 1e-13, 1e-10, 64)
                   .value;
  }
  return block_sum(panel, ExecPolicy::Serial);
}

double wasserstein_pp_double_integral(const StepCDF& F, const StepCDF& G,
                                      double p) {
  require(p > 1.0, "wasserstein_pp_double_integral: p must be > 1");
  std::vector<double> z;
  z.reserve(F.size() + G.size());
  z.insert(z.end(), F.location.begin(), F.location.end());
  z.insert(z.end(), G.location.begin(), G.location.end());
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  const std::size_t m = z.size();
  if (m < 2) return 0.0; // identical single atom
  std::vector<double> Fz(m), Gz(m);
  for (std::size_t k = 0; k < m; ++k) {
    Fz[k] = F.cdf(z[k]);
    Gz[k] = G.cdf(z[k]);
  }
  // cell (i, j): x in [z_i, z_{i+1}), y in [z_j, z_{j+1}), x < y; the CDFs
  // are the constants F_z/G_z there and the (y-x)^(p-2) factor integrates in
  // closed form, p(p-1) cancelling against the representation's prefactor.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i; j + 1 < m; ++j) {
      const double c = pos(Gz[i] - Fz[j]) + pos(Fz[i] - Gz[j]);
      if (c == 0.0) continue;
      double K;
      if (i == j) {
        K = std::pow(z[i + 1] - z[i], p);
      } else {
        const double a1 = z[i], a2 = z[i + 1];
        const double b1 = z[j], b2 = z[j + 1];
        K = std::pow(b2 - a1, p) - std::pow(b2 - a2, p) -
            std::pow(b1 - a1, p) + std::pow(b1 - a2, p);
      }
      total += c * K;
    }
  }
  return total;
}

double tail_fn(const std::function<double(double)>& f, double x) {
  if (x == 0.0) return 1.0; // both indicators apply
  if (x > 0.0) return 1.0 - f(x);
  return f(x);
}

void write_csv(const StepCDF& m, const std::string& path) {
  csv::Writer w(path, {"location", "mass"});
  for (std::size_t i = 0; i < m.size(); ++i)
    w.row({csv::fmt(m.location[i]), csv::fmt(m.mass[i])});
}

StepCDF read_step_cdf_csv(const std::string& path) {
  const auto rows = csv::read_numeric(path, 2);
  std::vector<double> loc, mass;
  loc.reserve(rows.size());
  mass.reserve(rows.size());
  for (const auto& r : rows) {
    loc.push_back(r[0]);
    mass.push_back(r[1]);
  }
  return StepCDF::from_atoms(std::move(loc), std::move(mass));
}

} // namespace rankdiff
