#include "rankdiff/model.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rankdiff/quadrature.hpp"

namespace rankdiff {

namespace {

constexpr int kTablePanels = 2048;

// Cumulative integral of f on the uniform table grid.  Per-panel adaptive
// quadrature keeps the table good to ~1e-12 even across kinks like
// |u - 1/2|^(3/2).
std::vector<double> cumulative_table(const std::function<double(double)>& f) {
  std::vector<double> table(kTablePanels + 1, 0.0);
  const double h = 1.0 / kTablePanels;
  for (int k = 0; k < kTablePanels; ++k) {
    const auto r = quad::integrate(f, k * h, (k + 1) * h, 1e-13, 1e-13, 128);
    table[k + 1] = table[k] + r.value;
  }
  return table;
}

double eval_antiderivative(const std::function<double(double)>& f,
                           const std::vector<double>& table, double u) {
  assert(u >= 0.0 && u <= 1.0);
  if (table.empty()) // no table built: direct quadrature, correct but slow
    return quad::integrate(f, 0.0, u, 1e-12, 1e-12).value;
  const double scaled = u * kTablePanels;
  int k = static_cast<int>(scaled);
  if (k > kTablePanels) k = kTablePanels;
  const double base = static_cast<double>(k) / kTablePanels;
  double local = 0.0;
  if (u != base) local = quad::integrate(f, base, u, 1e-13, 1e-13, 128).value;
  return table[static_cast<std::size_t>(k)] + local;
}

} // namespace

const char* to_string(Tri t) {
  switch (t) {
    case Tri::Holds: return "holds";
    case Tri::Fails: return "fails";
    default: return "undetermined";
  }
}

double CoefficientModel::sigma(double u) const { return std::sqrt(a(u)); }

double CoefficientModel::A(double u) const {
  assert(u >= 0.0 && u <= 1.0);
  if (A_closed) return A_closed(u);
  return eval_antiderivative(a, a_cumulative, u);
}

double CoefficientModel::B(double u) const {
  assert(u >= 0.0 && u <= 1.0);
  if (B_closed) return B_closed(u);
  return eval_antiderivative(b, b_cumulative, u);
}

double antiderivative(const CoefficientModel& m, Antiderivative which,
                      double u) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("antiderivative: u outside [0,1]");
  return which == Antiderivative::A ? m.A(u) : m.B(u);
}

CoefficientModel make_custom(std::string name, std::function<double(double)> a,
                             std::function<double(double)> b, bool r1,
                             bool r2) {
  CoefficientModel m;
  m.name = std::move(name);
  m.a = std::move(a);
  m.b = std::move(b);
  m.r1 = r1;
  m.r2 = r2;
  m.a_cumulative = cumulative_table(m.a);
  m.b_cumulative = cumulative_table(m.b);
  return m;
}

CoefficientModel make_builtin(BuiltinKind kind, const BuiltinParams& params) {
  CoefficientModel m;
  switch (kind) {
    case BuiltinKind::PorousMedium: {
      const double q = params.q;
      if (!(q > 1.0))
        throw std::invalid_argument("porous_medium: q must be > 1");
      m.name = "porous_medium";
      m.a = [q](double u) { return q * std::pow(u, q - 1.0); };
      m.b = [](double) { return 0.0; };
      m.A_closed = [q](double u) { return std::pow(u, q); };
      m.B_closed = [](double) { return 0.0; };
      m.r1 = q >= 2.0;
      m.r2 = q >= 3.0;
      break;
    }
    case BuiltinKind::ViscousConservation: {
      const double s2 = params.sigma2;
      if (!(s2 >= 0.0) || !std::isfinite(s2))
        throw std::invalid_argument("viscous_conservation: sigma2 must be >= 0");
      m.name = "viscous_conservation";
      m.a = [s2](double) { return s2; };
      m.A_closed = [s2](double u) { return s2 * u; };
      if (params.b_fn)
        m.b = params.b_fn;
      else
        m.b = [](double) { return 0.0; };
      if (params.B_fn)
        m.B_closed = params.B_fn;
      else if (!params.b_fn)
        m.B_closed = [](double) { return 0.0; };
      else
        m.b_cumulative = cumulative_table(m.b);
      m.r1 = true;
      m.r2 = params.b_fn_is_c1;
      break;
    }
    case BuiltinKind::Burgers: {
      const double s2 = params.sigma2;
      if (!(s2 >= 0.0) || !std::isfinite(s2))
        throw std::invalid_argument("burgers: sigma2 must be >= 0");
      m.name = "burgers";
      m.a = [s2](double) { return s2; };
      m.A_closed = [s2](double u) { return s2 * u; };
      m.b = [](double u) { return 2.0 * u; };
      m.B_closed = [](double u) { return u * u; };
      m.r1 = true;
      m.r2 = true;
      break;
    }
    case BuiltinKind::LogisticDemo: {
      const double s2 = params.sigma2;
      if (!(s2 >= 0.0) || !std::isfinite(s2))
        throw std::invalid_argument("logistic_demo: sigma2 must be >= 0");
      m.name = "logistic_demo";
      m.a = [s2](double) { return s2; };
      m.A_closed = [s2](double u) { return s2 * u; };
      m.b = [](double u) { return 1.0 - 2.0 * u; };
      m.B_closed = [](double u) { return u * (1.0 - u); };
      m.r1 = true;
      m.r2 = true;
      break;
    }
    case BuiltinKind::DegenerateDemo: {
      m.name = "degenerate_demo";
      m.a = [](double u) {
        const double s = u - 0.5;
        return u * (1.0 - u) * std::pow(std::abs(s), 1.5);
      };
      m.b = [](double u) {
        const double s = u - 0.5;
        return 0.5 * s - 4.0 * s * s * s;
      };
      // A(u) = g(u-1/2) + g(1/2) with odd g(s) = |s|^(5/2)/10 - (2/9)|s|^(9/2)
      m.A_closed = [](double u) {
        auto g = [](double s) {
          const double t = std::abs(s);
          const double v = std::pow(t, 2.5) / 10.0 - (2.0 / 9.0) * std::pow(t, 4.5);
          return s < 0.0 ? -v : v;
        };
        return g(u - 0.5) + g(0.5);
      };
      m.B_closed = [](double u) {
        const double s = u - 0.5;
        return u * (1.0 - u) * s * s;
      };
      m.r1 = true;  // a' ~ |u-1/2|^(1/2), continuous
      m.r2 = false; // a'' blows up at 1/2
      break;
    }
    default:
      throw std::invalid_argument("make_builtin: unknown kind");
  }
  return m;
}

BuiltinKind parse_builtin_kind(const std::string& name) {
  if (name == "porous_medium") return BuiltinKind::PorousMedium;
  if (name == "viscous_conservation") return BuiltinKind::ViscousConservation;
  if (name == "burgers") return BuiltinKind::Burgers;
  if (name == "logistic_demo") return BuiltinKind::LogisticDemo;
  if (name == "degenerate_demo") return BuiltinKind::DegenerateDemo;
  throw std::invalid_argument("unknown builtin model: " + name);
}

std::string builtin_kind_name(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::PorousMedium: return "porous_medium";
    case BuiltinKind::ViscousConservation: return "viscous_conservation";
    case BuiltinKind::Burgers: return "burgers";
    case BuiltinKind::LogisticDemo: return "logistic_demo";
    case BuiltinKind::DegenerateDemo: return "degenerate_demo";
  }
  return "?";
}

namespace {

// Verdict for "value strictly positive" from a grid minimum: an exact
// nonpositive sample disproves it, a clearly positive minimum certifies it,
// and a minimum inside (0, tol] is below the resolution of the test.
Tri positivity_verdict(double minimum, double tol) {
  if (minimum > tol) return Tri::Holds;
  if (minimum <= 0.0) return Tri::Fails;
  return Tri::Undetermined;
}

} // namespace

ConditionReport check_conditions(const CoefficientModel& m, int grid_size,
                                 double tol) {
  if (grid_size < 16) throw std::invalid_argument("check_conditions: grid_size < 16");
  if (grid_size % 2 != 0) ++grid_size; // keep u = 1/2 on the grid
  ConditionReport rep;
  rep.r1 = m.r1;
  rep.r2 = m.r2;
  const int g = grid_size;

  // d2/d3: grid minima of a
  rep.a_grid_min = std::numeric_limits<double>::infinity();
  rep.a_interior_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= g; ++k) {
    const double u = static_cast<double>(k) / g;
    const double av = m.a(u);
    if (av < rep.a_grid_min) {
      rep.a_grid_min = av;
      rep.a_grid_argmin = u;
    }
    if (k >= 1 && av < rep.a_interior_min) {
      rep.a_interior_min = av;
      rep.a_interior_argmin = u;
    }
  }
  rep.d3 = positivity_verdict(rep.a_grid_min, tol);
  rep.d2 = positivity_verdict(rep.a_interior_min, tol);

  // d1: strict monotonicity of A on the grid
  rep.min_A_increment = std::numeric_limits<double>::infinity();
  double prevA = m.A(0.0);
  for (int k = 1; k <= g; ++k) {
    const double curA = m.A(static_cast<double>(k) / g);
    rep.min_A_increment = std::min(rep.min_A_increment, curA - prevA);
    prevA = curA;
  }
  rep.d1 = positivity_verdict(rep.min_A_increment, tol);

  // The implications d3 => d2 => d1 are theorems, so certified verdicts
  // propagate: holds flows up the chain, fails flows down.
  if (rep.d3 == Tri::Holds) rep.d2 = Tri::Holds;
  if (rep.d2 == Tri::Holds) rep.d1 = Tri::Holds;
  if (rep.d1 == Tri::Fails) rep.d2 = Tri::Fails;
  if (rep.d2 == Tri::Fails) rep.d3 = Tri::Fails;

  // e1: B > 0 on the interior grid, B(1) = 0, and a/2B locally integrable
  rep.B_interior_min = std::numeric_limits<double>::infinity();
  for (int k = 1; k < g; ++k) {
    const double u = static_cast<double>(k) / g;
    const double Bv = m.B(u);
    if (Bv < rep.B_interior_min) {
      rep.B_interior_min = Bv;
      rep.B_interior_argmin = u;
    }
  }
  rep.B_at_one = m.B(1.0);
  double B_scale = std::max(1.0, std::abs(m.B(0.5)));
  const Tri b_positive = positivity_verdict(rep.B_interior_min, tol);
  const bool b_one_zero = std::abs(rep.B_at_one) <= tol * B_scale;
  if (b_positive == Tri::Fails || !b_one_zero) {
    rep.e1 = Tri::Fails;
  } else if (b_positive == Tri::Undetermined) {
    rep.e1 = Tri::Undetermined;
  } else {
    const auto ratio = [&m](double u) {
      const double den = 2.0 * m.B(u);
      if (den == 0.0) return std::numeric_limits<double>::infinity();
      return m.a(u) / den;
    };
    const auto loc = quad::integrate(ratio, 1.0 / g, 1.0 - 1.0 / g, 1e-9, 1e-9);
    rep.e1 = (loc.converged && std::isfinite(loc.value)) ? Tri::Holds
                                                         : Tri::Undetermined;
  }

  // e2: both halves of the first-moment integral, approached by halving
  // toward the singular endpoints
  const auto left = [&m](double u) {
    const double den = 2.0 * std::abs(m.B(u));
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return m.a(u) * u / den;
  };
  const auto right = [&m](double u) {
    const double den = 2.0 * std::abs(m.B(u));
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return m.a(u) * (1.0 - u) / den;
  };
  const auto lr = quad::integrate_to_endpoint(left, 0.5, 0.0, tol);
  const auto rr = quad::integrate_to_endpoint(right, 0.5, 1.0, tol);
  if (lr.status == quad::TailStatus::Divergent ||
      rr.status == quad::TailStatus::Divergent) {
    rep.e2 = Tri::Fails;
    rep.e2_integral = std::numeric_limits<double>::infinity();
  } else if (lr.status == quad::TailStatus::Converged &&
             rr.status == quad::TailStatus::Converged) {
    rep.e2 = Tri::Holds;
    // lr runs downward from 1/2, so its signed value is the negative of the
    // lower-half contribution.
    rep.e2_integral = rr.value - lr.value;
  } else {
    rep.e2 = Tri::Undetermined;
    rep.e2_integral = rr.value - lr.value;
  }
  return rep;
}

} // namespace rankdiff
