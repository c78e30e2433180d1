#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace rankdiff::quad {

// Adaptive Gauss-Kronrod 7/15 integration.  Small, self-contained, and in
// full control of its failure modes: callers here need explicit
// converged/divergent/undetermined outcomes (condition checks, improper
// integrals up to a singular endpoint), which is exactly the part a canned
// integrator hides behind an error code.

namespace detail {

// Kronrod 15 abscissae (positive half, [-1,1]) and weights; rows 1,3,5,7
// are the embedded Gauss-7 nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i)
    resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  value = resk * h;
  err = std::abs((resk - resg) * h);
}

} // namespace detail

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};

// Integrate f over [a, b] by bisecting the worst panel until the summed
// Kronrod error estimate meets max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 double rel_tol = 1e-12, std::size_t max_panels = 4096) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (a > b) { // signed integral: run the adaptive loop on the sorted pair
    std::swap(a, b);
    sign = -1.0;
  }
  struct Panel {
    double a, b, value, err;
  };
  std::vector<Panel> panels;
  panels.reserve(64);
  double v, e;
  detail::gk15(f, a, b, v, e);
  panels.push_back({a, b, v, e});
  double total = v, toterr = e;
  while (panels.size() < max_panels) {
    if (!std::isfinite(total)) break;
    if (toterr <= std::max(abs_tol, rel_tol * std::abs(total))) {
      out.converged = true;
      break;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) { // panel at rounding width, give up on it
      out.converged = toterr <= std::max(abs_tol, rel_tol * std::abs(total)) * 4;
      break;
    }
    double v1, e1, v2, e2;
    detail::gk15(f, p.a, mid, v1, e1);
    detail::gk15(f, mid, p.b, v2, e2);
    total += v1 + v2 - p.value;
    toterr += e1 + e2 - p.err;
    panels[worst] = {p.a, mid, v1, e1};
    panels.push_back({mid, p.b, v2, e2});
  }
  if (panels.size() >= max_panels)
    out.converged = toterr <= std::max(abs_tol, rel_tol * std::abs(total));
  out.value = sign * total;
  out.abs_error = toterr;
  return out;
}

enum class TailStatus { Converged, Divergent, Undetermined };

struct TailResult {
  double value = 0.0;
  TailStatus status = TailStatus::Undetermined;
  int halvings = 0;
};

// Integrate f from `anchor` up to a possibly singular `endpoint` (either
// side).  The gap is halved geometrically: panel k covers the slice between
// distance eps/2^(k-1) and eps/2^k from the endpoint.  Increments that decay
// geometrically are summed with their extrapolated tail; increments that
// refuse to decay flag divergence.  Neither within `max_halvings` panels
// means we genuinely cannot tell at this tolerance.
template <class F>
TailResult integrate_to_endpoint(F&& f, double anchor, double endpoint,
                                 double tol = 1e-10, int max_halvings = 40) {
  TailResult out;
  if (anchor == endpoint) {
    out.status = TailStatus::Converged;
    return out;
  }
  const double gap = endpoint - anchor;
  double eps = 0.5 * std::abs(gap);
  const double sgn = gap > 0 ? 1.0 : -1.0;
  const double panel_tol = tol / 64.0;
  // Panels thinner than ~2^-40 of |endpoint| are dominated by rounding in the
  // node placement (for endpoint 0 this is never hit: arguments near zero
  // stay exactly representable).
  const double eps_floor = std::ldexp(std::abs(endpoint), -40);
  Result base = integrate(f, anchor, endpoint - sgn * eps, panel_tol);
  double total = base.value;
  double prev = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ratios;
  int grow_streak = 0;
  // Verdict when subdivision stops without an in-loop decision: a stable
  // geometric decay is summed to its extrapolated limit, persistently flat
  // or growing increments of a one-signed integrand mean divergence (the
  // log case lands here), anything else is a genuine "cannot tell".
  const auto decide_from_trend = [&]() {
    if (ratios.size() >= 3) {
      const auto last3 = std::minmax(
          {ratios[ratios.size() - 1], ratios[ratios.size() - 2],
           ratios[ratios.size() - 3]});
      const bool decaying = last3.first > 0.0 && last3.second < 0.97 &&
                            last3.second <= last3.first * 1.05;
      if (decaying) {
        const double rho = ratios.back();
        out.value = total + prev * rho / (1.0 - rho);
        out.status = TailStatus::Converged;
        return;
      }
      const bool flat = last3.first >= 0.998;
      if (flat && std::abs(prev) > tol) {
        out.value = total;
        out.status = TailStatus::Divergent;
        return;
      }
    }
    out.value = total;
    out.status = TailStatus::Undetermined;
  };
  for (int k = 1; k <= max_halvings; ++k) {
    const double lo = endpoint - sgn * eps;
    eps *= 0.5;
    const double hi = endpoint - sgn * eps;
    if (eps <= eps_floor || hi == lo || hi == endpoint) break;
    out.halvings = k;
    const double inc = integrate(f, lo, hi, panel_tol).value;
    total += inc;
    if (!std::isfinite(total) || std::abs(total) > 1e100) {
      out.value = total;
      out.status = TailStatus::Divergent;
      return out;
    }
    const double scale = std::max(1.0, std::abs(total));
    if (std::abs(inc) <= 0.5 * tol * scale) {
      out.value = total;
      out.status = TailStatus::Converged;
      return out;
    }
    if (std::isfinite(prev) && prev != 0.0) {
      const double r = inc / prev; // positive for one-signed integrands
      ratios.push_back(r);
      grow_streak = (std::abs(inc) >= 1.02 * std::abs(prev)) ? grow_streak + 1 : 0;
      if (grow_streak >= 5) {
        out.value = total;
        out.status = TailStatus::Divergent;
        return out;
      }
      if (ratios.size() >= 3) {
        const auto last3 = std::minmax(
            {ratios[ratios.size() - 1], ratios[ratios.size() - 2],
             ratios[ratios.size() - 3]});
        const bool stable = last3.first > 0.0 && last3.second < 0.97 &&
                            last3.second <= last3.first * 1.05;
        if (stable) {
          const double rho = ratios.back();
          const double tail = inc * rho / (1.0 - rho);
          if (std::abs(tail) <= 8.0 * tol * scale) {
            out.value = total + tail;
            out.status = TailStatus::Converged;
            return out;
          }
        }
      }
    }
    prev = inc;
  }
  decide_from_trend();
  return out;
}

} // namespace rankdiff::quad
