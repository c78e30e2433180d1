#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rankdiff {

// Three-valued verdict for grid/quadrature based checks: numerical evidence
// can certify a strict inequality, certify its failure, or genuinely not
// tell at the working tolerance.
enum class Tri { Holds, Fails, Undetermined };

const char* to_string(Tri t);

// A scalar coefficient pair (a, b) on [0,1]: a is the squared volatility
// assigned to a particle's rank, b the drift.  A and B are their
// antiderivatives from 0; when no closed form is supplied they are served
// from a cumulative quadrature table built once at construction, so the
// object is immutable afterwards and safe to share across threads.
struct CoefficientModel {
  std::string name;
  std::function<double(double)> a;
  std::function<double(double)> b;
  std::function<double(double)> A_closed; // optional
  std::function<double(double)> B_closed; // optional

  bool r1 = false; // declared: a is C1 on [0,1] (trusted, not verified)
  bool r2 = false; // declared: a is C2 and b is C1 with Holder derivatives

  double sigma(double u) const;
  double A(double u) const;
  double B(double u) const;

  // cumulative tables on a uniform grid, used when closed forms are absent
  std::vector<double> a_cumulative;
  std::vector<double> b_cumulative;
};

enum class BuiltinKind {
  PorousMedium,        // a = q u^(q-1), b = 0
  ViscousConservation, // a = sigma2, b supplied
  Burgers,             // a = sigma2, B(u) = u^2
  LogisticDemo,        // a = sigma2, B(u) = u(1-u)
  DegenerateDemo,      // a = u(1-u)|u-1/2|^(3/2), B(u) = u(1-u)(u-1/2)^2
};

struct BuiltinParams {
  double q = 2.0;      // PorousMedium exponent, must be > 1
  double sigma2 = 1.0; // constant-diffusion kinds, must be >= 0
  std::function<double(double)> b_fn;  // ViscousConservation drift
  std::function<double(double)> B_fn;  // optional closed antiderivative of b_fn
  bool b_fn_is_c1 = true;              // declared smoothness of b_fn
};

CoefficientModel make_builtin(BuiltinKind kind, const BuiltinParams& params = {});
BuiltinKind parse_builtin_kind(const std::string& name);
std::string builtin_kind_name(BuiltinKind kind);

// Custom model from raw coefficient callables; builds the antiderivative
// tables so A/B meet the 1e-10 tolerance without closed forms.
CoefficientModel make_custom(std::string name, std::function<double(double)> a,
                             std::function<double(double)> b, bool r1 = false,
                             bool r2 = false);

enum class Antiderivative { A, B };

double antiderivative(const CoefficientModel& m, Antiderivative which, double u);

struct ConditionReport {
  // a-side: d3 (uniform ellipticity) => d2 (a > 0 on (0,1]) => d1 (A strictly
  // increasing); the chain is enforced on the verdicts.
  Tri d1 = Tri::Undetermined;
  Tri d2 = Tri::Undetermined;
  Tri d3 = Tri::Undetermined;
  double a_grid_min = 0.0;      // d3 witness: min of a over the full grid
  double a_grid_argmin = 0.0;
  double a_interior_min = 0.0;  // d2 witness: min over grid points in (0,1]
  double a_interior_argmin = 0.0;
  double min_A_increment = 0.0; // d1 witness

  bool r1 = false; // echoed declarations
  bool r2 = false;

  // b-side: e1 (B > 0 on (0,1), B(1) = 0, a/2B locally integrable),
  // e2 (the first-moment integral of the stationary profile is finite).
  Tri e1 = Tri::Undetermined;
  Tri e2 = Tri::Undetermined;
  double B_interior_min = 0.0;  // e1 witness
  double B_interior_argmin = 0.0;
  double B_at_one = 0.0;        // e1 witness
  double e2_integral = 0.0;     // e2 witness; +inf when divergent
};

ConditionReport check_conditions(const CoefficientModel& m, int grid_size = 256,
                                 double tol = 1e-9);

} // namespace rankdiff
