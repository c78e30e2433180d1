#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rankdiff/measure.hpp"
#include "rankdiff/model.hpp"

namespace rankdiff {

// Everything needed to evaluate the closed-form stationary solution of a
// model with positive drift antiderivative: Psi(u) is the antiderivative of
// a/(2B) anchored at 1/2, the stationary CDF is x -> Psi^{-1}(x + xbar), and
// the quantile function is Psi - xbar.
struct StationaryProfile {
  const CoefficientModel* model = nullptr;
  std::vector<double> grid;    // clustered u-grid
  std::vector<double> psi_val; // Psi on the grid, Psi(1/2) = 0 exactly
  bool finite_at_zero = false; // Psi has a finite limit at 0+
  bool finite_at_one = false;
  double psi_limit_zero = 0.0; // the limits when finite
  double psi_limit_one = 0.0;
  double first_abs_moment = 0.0; // +inf when the moment integral diverges

  double psi(double u) const;            // table + local quadrature
  double psi_inverse(double x, double tol = 1e-10) const;
  QuantileProfile quantile_profile(double xbar = 0.0) const;
};

// Throws std::domain_error("no stationary family...") unless B > 0 on the
// interior grid and B(1) ~ 0 (the cheap part of E1).
void require_stationary_family(const CoefficientModel& m);

std::shared_ptr<const StationaryProfile> build_stationary(
    const CoefficientModel& m, std::size_t grid_count = 2048);

// One-off evaluations without a prebuilt profile.
double psi(const CoefficientModel& m, double u, double tol = 1e-10);
double psi_inverse(const CoefficientModel& m, double x, double tol = 1e-10);

// F_inf(x) = Psi^{-1}(x + xbar) as a callable CDF.
std::function<double(double)> stationary_cdf(const CoefficientModel& m,
                                             double xbar);

// First absolute moment of the centered stationary law, computed as the
// integrability integral int a*u/(2|B|) du + int a*(1-u)/(2|B|) du over the
// two halves; +inf when it diverges (the same quadrature core as the e2
// condition check, so the two always agree).
double stationary_first_moment(const CoefficientModel& m);

// xbar = int_0^1 (Psi(u) - F0^{-1}(u)) du; throws when the integral fails to
// converge (infinite first moment of the initial law).
double centering_offset(const CoefficientModel& m,
                        const std::function<double(double)>& quantile_of_F0);

enum class HardyVerdict { Satisfied, Violated, Undetermined };

struct HardyReport {
  HardyVerdict verdict = HardyVerdict::Undetermined;
  // partial suprema of u * int_u^{1/2} (a/2B)^2 and (1-u) * int_{1/2}^u
  // (a/2B)^2 on three geometric refinement levels
  double sup_left[3] = {0, 0, 0};
  double sup_right[3] = {0, 0, 0};
};

// Weighted Hardy criterion for a spectral gap: both partial suprema must
// stabilize under grid refinement toward the endpoints.
HardyReport hardy_poincare_check(const CoefficientModel& m);

// The one-parameter family of stationary CDFs of the degenerate demo model:
// a plateau of width h >= 0 at level 1/2 bridged by two parabolic caps.
double degenerate_family_cdf(double h, double x);

// Smooth compactly supported test function exp(-1/(1-z^2)) on |z| < 1 with
// z = (x - center)/width, plus its first two derivatives.
struct BumpTestFn {
  double center = 0.0;
  double width = 1.0;
  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

std::vector<BumpTestFn> make_bump_family(std::size_t count, double lo, double hi);

// (u, Psi(u)) rows on the profile's grid.
void write_psi_csv(const StationaryProfile& prof, const std::string& path);

// (x, F_inf(x)) rows on a uniform x grid.
void write_stationary_cdf_csv(const StationaryProfile& prof, double xbar,
                              double x_lo, double x_hi, std::size_t count,
                              const std::string& path);

// max over the family of |int (1/2) A(F(x)) phi''(x) + B(F(x)) phi'(x) dx|;
// zero (to quadrature accuracy) precisely for weak stationary solutions.
double stationary_residual(const CoefficientModel& m,
                           const std::function<double(double)>& F,
                           std::span<const BumpTestFn> fns);

} // namespace rankdiff
