#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankdiff/measure.hpp"
#include "rankdiff/model.hpp"

namespace rankdiff {

// Deterministic reference solvers for F_t = (1/2) A(F)_xx - B(F)_x, used to
// cross-check the particle systems: a conservative finite-difference scheme
// in x and an independent solver for the quantile flow in u.

struct PdeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TimeScheme { Explicit, SemiImplicit };

struct FdParams {
  double x_lo = -8.0;
  double x_hi = 8.0;
  std::size_t nodes = 801; // uniform grid including both ends
  double dt = 1e-4;
  TimeScheme scheme = TimeScheme::Explicit;
  double monotonicity_slack = 1e-12;
};

struct GridSolution {
  std::vector<double> x;
  std::vector<double> t;
  std::vector<std::vector<double>> F; // one row per snapshot time

  // linear interpolation in x, clamped to the end values
  double eval(std::size_t snap, double xq) const;
};

// March the CDF on a truncated domain with Dirichlet ends F(x_lo), F(x_hi)
// frozen at their initial values.  Face fluxes are
//   (1/2) a(Fbar) (F_{j+1} - F_j)/dx - B(Fbar),  Fbar = (F_j + F_{j+1})/2,
// so mass is conserved up to the boundary fluxes.  The explicit scheme
// enforces the parabolic and advective step bounds up front and every step
// must leave the solution nondecreasing; a violation throws instead of
// returning a non-CDF.  SemiImplicit treats diffusion by a tridiagonal
// solve with coefficients frozen at the current state.
GridSolution fd_solve(const CoefficientModel& m,
                      const std::function<double(double)>& F0, double t_end,
                      const FdParams& params,
                      std::span<const double> snapshot_times = {});

// Quantile flow dX/dt = b(u) - (1/2) d/du [ a(u) / dX/du ] on the interior
// rank grid u_k = k/(m+1).  End nodes reuse the divergence of their inner
// neighbor (one-sided closure that keeps the update conservative inside).
class QuantileStepper {
 public:
  QuantileStepper(const CoefficientModel& m, std::size_t count);

  const std::vector<double>& ranks() const { return u_; }
  double du() const { return du_; }

  // largest explicit substep the current state allows (safety-scaled
  // inverse of the stiffest diffusion coupling)
  double stable_dt(std::span<const double> X, double safety = 0.8) const;

  // one forward-Euler substep of exactly dt; returns false and leaves X
  // untouched when the step would destroy strict monotonicity
  bool try_substep(std::vector<double>& X, double dt) const;

  // advance by exactly dt, subdividing by the stability bound and halving
  // on monotonicity loss; throws PdeError below dt_cap/2^10
  void advance(std::vector<double>& X, double dt, double dt_cap,
               double safety = 0.8) const;

 private:
  void derivative(std::span<const double> X, std::vector<double>& dX) const;

  std::vector<double> u_;      // interior ranks
  std::vector<double> a_face_; // a at the midpoints between ranks
  std::vector<double> b_node_;
  double du_ = 0.0;
  mutable std::vector<double> scratch_, psi_;
};

struct QuantileParams {
  std::size_t count = 512; // interior ranks
  double dt_cap = 1e-3;    // upper bound on any substep
  double safety = 0.8;
};

struct QuantileSolution {
  std::vector<double> u;
  std::vector<double> t;
  std::vector<std::vector<double>> X; // quantile values per snapshot

  QuantileProfile profile(std::size_t snap,
                          EndpointBehavior at_zero = EndpointBehavior::Divergent,
                          EndpointBehavior at_one = EndpointBehavior::Divergent) const;
};

QuantileSolution quantile_pde_solve(const CoefficientModel& m,
                                    const std::function<double(double)>& finv0,
                                    double t_end, const QuantileParams& params,
                                    std::span<const double> snapshot_times = {});

// Instantaneous Wasserstein-p dissipation of two quantile curves on a shared
// increasing rank grid:
//   (p(p-1)/2) int |X-Y|^{p-2} a(u) (X_u - Y_u)^2 / (X_u Y_u) du,
// quadrature weights cover all of (0,1) and sum to one.  Requires p >= 2
// and strictly increasing X and Y.
double dissipation_rate(const CoefficientModel& m, double p,
                        std::span<const double> u, std::span<const double> X,
                        std::span<const double> Y);

struct DissipationReport {
  double wpp_t1 = 0.0;
  double wpp_t2 = 0.0;
  double lhs = 0.0;     // wpp_t2 - wpp_t1
  double rhs = 0.0;     // minus the time-integrated rate
  double rel_err = 0.0; // |lhs - rhs| / max(|lhs|, |rhs|)
};

// Evolve two initial quantile functions with the same substep sequence and
// compare the drop in W_p^p against the time integral of the dissipation
// rate (trapezoid in t).
DissipationReport dissipation_identity_check(
    const CoefficientModel& m, double p,
    const std::function<double(double)>& finv0_F,
    const std::function<double(double)>& finv0_G, double t1, double t2,
    const QuantileParams& params);

// Trapezoid rule for int (F(x) - G(x))^2 / (2 w(x)) dx on a uniform grid;
// throws when the weight is not strictly positive somewhere on the grid.
double weighted_l2(const std::function<double(double)>& F,
                   const std::function<double(double)>& G,
                   const std::function<double(double)>& weight, double x_lo,
                   double x_hi, std::size_t nodes = 2001);

// Density of the stationary law F_inf(x) = Psi^{-1}(x + xbar):
// p_inf(x) = 2 B(F_inf(x)) / a(F_inf(x)).
std::function<double(double)> stationary_density(const CoefficientModel& m,
                                                 double xbar);

// Long-format (t, coordinate, value) tables.
void write_csv(const GridSolution& sol, const std::string& path);     // t,x,F
void write_csv(const QuantileSolution& sol, const std::string& path); // t,u,X

} // namespace rankdiff
