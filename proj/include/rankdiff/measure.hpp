#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rankdiff/parallel.hpp"

namespace rankdiff {

// Purely atomic probability measure, stored as its CDF jumps.
struct StepCDF {
  std::vector<double> location;   // strictly increasing
  std::vector<double> mass;       // positive, sums to 1 within 1e-12
  std::vector<double> cumulative; // running sums of mass

  static StepCDF from_atoms(std::vector<double> location,
                            std::vector<double> mass);
  // Empirical measure of a sample; ties are merged into one atom.
  static StepCDF from_samples(std::span<const double> xs);

  double cdf(double x) const;
  // Pseudo-inverse inf{x : F(x) > u}; note the strict inequality, so the
  // value at a jump's own cumulative level is the *next* atom.
  double quantile(double u) const;
  std::size_t size() const { return location.size(); }
};

enum class EndpointBehavior { Clamped, Divergent };

// Tabulated quantile function: strictly increasing grid in (0,1),
// nondecreasing values, linear interpolation in between.  Evaluation beyond
// the grid clamps for compactly supported laws and extends the end panel's
// slope for laws whose quantile diverges at 0/1.
struct QuantileProfile {
  std::vector<double> grid;
  std::vector<double> value;
  EndpointBehavior at_zero = EndpointBehavior::Clamped;
  EndpointBehavior at_one = EndpointBehavior::Clamped;

  double operator()(double u) const;
};

QuantileProfile make_profile(std::vector<double> grid,
                             std::vector<double> value,
                             EndpointBehavior at_zero = EndpointBehavior::Clamped,
                             EndpointBehavior at_one = EndpointBehavior::Clamped);

// Tabulate a callable quantile function on the standard clustered grid.
QuantileProfile tabulate_quantile(const std::function<double(double)>& finv,
                                  std::size_t count = 2048,
                                  EndpointBehavior at_zero = EndpointBehavior::Divergent,
                                  EndpointBehavior at_one = EndpointBehavior::Divergent);

double quantile(const StepCDF& m, double u);
double quantile(const QuantileProfile& f, double u);

// u-grid of `count` points in (0,1) clustered quadratically at both ends
// (Chebyshev points mapped to the unit interval).
std::vector<double> clustered_unit_grid(std::size_t count = 2048);

// One-dimensional Wasserstein machinery.  Every evaluator returns W_p^p.

// Exact for a pair of step CDFs: the quantile difference is piecewise
// constant on the merged cumulative breakpoints.
double wasserstein_pp_quantile(const StepCDF& F, const StepCDF& G, double p);

// Midpoint rule on n_quad uniform panels for tabulated profiles, with
// geometric refinement into any endpoint carrying a Divergent tag.  Returns
// +inf when the endpoint contributions keep growing (non-integrable gap).
double wasserstein_pp_quantile(const QuantileProfile& F,
                               const QuantileProfile& G, double p,
                               std::size_t n_quad = 2048);

// Mean p-th power gap of two equally sized samples after sorting both.
double wasserstein_pp_sorted(std::span<const double> x,
                             std::span<const double> y, double p,
                             ExecPolicy pol = ExecPolicy::Parallel);

// Sample vs continuous profile: sum over rank panels ((i-1)/n, i/n) of the
// integrated p-th power gap to the profile.
double wasserstein_pp_samples_vs_profile(std::span<const double> x,
                                         const QuantileProfile& f, double p);

// Independent route via the double-integral representation over the plane;
// exact for step CDFs (closed-form rectangle sums).  Requires p > 1.
double wasserstein_pp_double_integral(const StepCDF& F, const StepCDF& G,
                                      double p);

// tl(f, x) = 1_{x>=0}(1 - f(x)) + 1_{x<=0} f(x); both indicators are closed
// at 0, so tl(f, 0) = 1 exactly regardless of f.
double tail_fn(const std::function<double(double)>& f, double x);

void write_csv(const StepCDF& m, const std::string& path);
StepCDF read_step_cdf_csv(const std::string& path);

} // namespace rankdiff
