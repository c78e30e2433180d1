#include "rankdiff/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankdiff/csv.hpp"
#include "rankdiff/stationary.hpp"

namespace rankdiff {

namespace {

std::vector<double> effective_snapshots(std::span<const double> times,
                                        double t_end) {
  if (times.empty()) return {0.0, t_end};
  std::vector<double> v(times.begin(), times.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || v[i] > t_end * (1.0 + 1e-12) + 1e-12)
      throw std::invalid_argument("snapshot time outside [0, t_end]");
    if (i > 0 && v[i] < v[i - 1])
      throw std::invalid_argument("snapshot times must be nondecreasing");
    v[i] = std::min(v[i], t_end);
  }
  return v;
}

} // namespace

double GridSolution::eval(std::size_t snap, double xq) const {
  const auto& row = F.at(snap);
  if (xq <= x.front()) return row.front();
  if (xq >= x.back()) return row.back();
  const double dx = x[1] - x[0];
  std::size_t j = static_cast<std::size_t>((xq - x.front()) / dx);
  j = std::min(j, x.size() - 2);
  const double w = (xq - x[j]) / (x[j + 1] - x[j]);
  return row[j] * (1.0 - w) + row[j + 1] * w;
}

GridSolution fd_solve(const CoefficientModel& m,
                      const std::function<double(double)>& F0, double t_end,
                      const FdParams& p,
                      std::span<const double> snapshot_times) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("fd_solve: bad t_end");
  if (p.nodes < 8) throw std::invalid_argument("fd_solve: nodes < 8");
  if (!(p.x_hi > p.x_lo)) throw std::invalid_argument("fd_solve: empty domain");
  if (!(p.dt > 0.0)) throw std::invalid_argument("fd_solve: dt must be > 0");
  const std::size_t N = p.nodes;
  const double dx = (p.x_hi - p.x_lo) / static_cast<double>(N - 1);

  // coefficient bounds for the step-size preconditions
  double amax = 0.0, bmax = 0.0;
  for (int k = 0; k <= 1024; ++k) {
    const double u = static_cast<double>(k) / 1024.0;
    amax = std::max(amax, m.a(u));
    bmax = std::max(bmax, std::abs(m.b(u)));
  }
  if (p.scheme == TimeScheme::Explicit && amax > 0.0 &&
      p.dt > dx * dx / amax)
    throw std::invalid_argument("fd_solve: explicit step violates dt <= dx^2/max(a)");
  if (bmax > 0.0 && p.dt > dx / bmax)
    throw std::invalid_argument("fd_solve: step violates dt <= dx/max(|b|)");

  GridSolution sol;
  sol.x.resize(N);
  for (std::size_t j = 0; j < N; ++j)
    sol.x[j] = p.x_lo + static_cast<double>(j) * dx;

  std::vector<double> F(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double v = F0(sol.x[j]);
    if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9)
      throw std::invalid_argument("fd_solve: initial CDF outside [0,1]");
    F[j] = std::clamp(v, 0.0, 1.0);
    if (j > 0 && F[j] < F[j - 1] - p.monotonicity_slack)
      throw std::invalid_argument("fd_solve: initial CDF not nondecreasing");
    if (j > 0) F[j] = std::max(F[j], F[j - 1]);
  }

  const auto times = effective_snapshots(snapshot_times, t_end);
  std::size_t sp = 0;
  double t = 0.0;
  const auto emit_due = [&] {
    while (sp < times.size() && times[sp] <= t + 0.5 * p.dt + 1e-12) {
      sol.t.push_back(times[sp]);
      sol.F.push_back(F);
      ++sp;
    }
  };
  emit_due();

  std::vector<double> faces(N - 1), Fn(N);
  std::vector<double> low, diag, up, rhs; // semi-implicit workspaces
  const auto check_monotone = [&](const std::vector<double>& G) {
    for (std::size_t j = 1; j < N; ++j)
      if (G[j] < G[j - 1] - p.monotonicity_slack)
        throw PdeError("fd_solve: monotonicity lost at t = " + std::to_string(t));
    for (std::size_t j = 0; j < N; ++j)
      if (!std::isfinite(G[j]) || G[j] < -1e-9 || G[j] > 1.0 + 1e-9)
        throw PdeError("fd_solve: solution left [0,1] at t = " + std::to_string(t));
  };

  std::size_t step = 0;
  while (t < t_end - 1e-12 * (1.0 + t_end)) {
    const double t_next =
        std::min(static_cast<double>(step + 1) * p.dt, t_end);
    const double h = t_next - t;
    if (p.scheme == TimeScheme::Explicit) {
      for (std::size_t f = 0; f + 1 < N; ++f) {
        const double fb = std::clamp(0.5 * (F[f] + F[f + 1]), 0.0, 1.0);
        faces[f] = 0.5 * m.a(fb) * (F[f + 1] - F[f]) / dx - m.B(fb);
      }
      Fn[0] = F[0];
      Fn[N - 1] = F[N - 1];
      const double hdx = h / dx;
      for (std::size_t j = 1; j + 1 < N; ++j)
        Fn[j] = F[j] + hdx * (faces[j] - faces[j - 1]);
    } else {
      // diffusion implicit with coefficients frozen at the current state,
      // advection explicit
      const std::size_t M = N - 2;
      low.assign(M, 0.0);
      diag.assign(M, 0.0);
      up.assign(M, 0.0);
      rhs.assign(M, 0.0);
      const double lam = h / (2.0 * dx * dx);
      const double hdx = h / dx;
      for (std::size_t j = 1; j + 1 < N; ++j) {
        const double fbl = std::clamp(0.5 * (F[j - 1] + F[j]), 0.0, 1.0);
        const double fbr = std::clamp(0.5 * (F[j] + F[j + 1]), 0.0, 1.0);
        const double aL = m.a(fbl), aR = m.a(fbr);
        const std::size_t i = j - 1;
        low[i] = -lam * aL;
        up[i] = -lam * aR;
        diag[i] = 1.0 + lam * (aL + aR);
        rhs[i] = F[j] - hdx * (m.B(fbr) - m.B(fbl));
      }
      rhs[0] += lam * m.a(std::clamp(0.5 * (F[0] + F[1]), 0.0, 1.0)) * F[0];
      rhs[M - 1] +=
          lam * m.a(std::clamp(0.5 * (F[N - 2] + F[N - 1]), 0.0, 1.0)) *
          F[N - 1];
      // Thomas sweep
      for (std::size_t i = 1; i < M; ++i) {
        const double w = low[i] / diag[i - 1];
        diag[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
      Fn[0] = F[0];
      Fn[N - 1] = F[N - 1];
      Fn[N - 2] = rhs[M - 1] / diag[M - 1];
      for (std::size_t i = M - 1; i-- > 0;)
        Fn[i + 1] = (rhs[i] - up[i] * Fn[i + 2]) / diag[i];
    }
    t = t_next;
    ++step;
    check_monotone(Fn);
    F.swap(Fn);
    emit_due();
  }
  return sol;
}

QuantileStepper::QuantileStepper(const CoefficientModel& m,
                                 std::size_t count) {
  if (count < 4) throw std::invalid_argument("QuantileStepper: count < 4");
  const double denom = static_cast<double>(count + 1);
  du_ = 1.0 / denom;
  u_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    u_[i] = static_cast<double>(i + 1) / denom;
  a_face_.resize(count - 1);
  for (std::size_t f = 0; f + 1 < count; ++f)
    a_face_[f] = m.a((static_cast<double>(f + 1) + 0.5) / denom);
  b_node_.resize(count);
  for (std::size_t i = 0; i < count; ++i) b_node_[i] = m.b(u_[i]);
}

void QuantileStepper::derivative(std::span<const double> X,
                                 std::vector<double>& dX) const {
  const std::size_t n = u_.size();
  psi_.resize(n - 1);
  for (std::size_t f = 0; f + 1 < n; ++f)
    psi_[f] = a_face_[f] * du_ / (X[f + 1] - X[f]);
  dX.resize(n);
  for (std::size_t k = 1; k + 1 < n; ++k)
    dX[k] = b_node_[k] - 0.5 * (psi_[k] - psi_[k - 1]) / du_;
  // end nodes reuse the divergence of their inner neighbor
  dX[0] = b_node_[0] - 0.5 * (psi_[1] - psi_[0]) / du_;
  dX[n - 1] = b_node_[n - 1] - 0.5 * (psi_[n - 2] - psi_[n - 3]) / du_;
}

double QuantileStepper::stable_dt(std::span<const double> X,
                                  double safety) const {
  const std::size_t n = u_.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double L = 0.0;
    if (k > 0) {
      const double g = X[k] - X[k - 1];
      L += 0.5 * a_face_[k - 1] / (g * g);
    }
    if (k + 1 < n) {
      const double g = X[k + 1] - X[k];
      L += 0.5 * a_face_[k] / (g * g);
    }
    worst = std::max(worst, L);
  }
  if (!(worst > 0.0)) return std::numeric_limits<double>::infinity();
  return safety / worst;
}

bool QuantileStepper::try_substep(std::vector<double>& X, double dt) const {
  derivative(X, scratch_);
  const std::size_t n = X.size();
  for (std::size_t i = 0; i < n; ++i) scratch_[i] = X[i] + dt * scratch_[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(scratch_[i])) return false;
    if (i > 0 && !(scratch_[i] > scratch_[i - 1])) return false;
  }
  X.swap(scratch_);
  return true;
}

void QuantileStepper::advance(std::vector<double>& X, double dt,
                              double dt_cap, double safety) const {
  if (!(dt >= 0.0)) throw std::invalid_argument("advance: dt must be >= 0");
  if (!(dt_cap > 0.0)) throw std::invalid_argument("advance: dt_cap must be > 0");
  const double floor_dt = dt_cap / 1024.0;
  double remaining = dt;
  while (remaining > 0.0) {
    double h = std::min({stable_dt(X, safety), dt_cap, remaining});
    while (!try_substep(X, h)) {
      h *= 0.5;
      if (h < floor_dt)
        throw PdeError("quantile step lost monotonicity below the step floor");
    }
    remaining -= h;
    if (remaining < 1e-14 * dt) remaining = 0.0;
  }
}

QuantileProfile QuantileSolution::profile(std::size_t snap,
                                          EndpointBehavior at_zero,
                                          EndpointBehavior at_one) const {
  return make_profile(u, X.at(snap), at_zero, at_one);
}

QuantileSolution quantile_pde_solve(const CoefficientModel& m,
                                    const std::function<double(double)>& finv0,
                                    double t_end, const QuantileParams& params,
                                    std::span<const double> snapshot_times) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("quantile_pde_solve: bad t_end");
  QuantileStepper st(m, params.count);
  QuantileSolution sol;
  sol.u = st.ranks();
  std::vector<double> X(params.count);
  for (std::size_t i = 0; i < X.size(); ++i) {
    X[i] = finv0(sol.u[i]);
    if (!std::isfinite(X[i]) || (i > 0 && !(X[i] > X[i - 1])))
      throw std::invalid_argument(
          "quantile_pde_solve: initial quantile must be finite and strictly "
          "increasing on the rank grid");
  }
  const auto times = effective_snapshots(snapshot_times, t_end);
  double t = 0.0;
  for (std::size_t sp = 0; sp < times.size(); ++sp) {
    if (times[sp] > t)
      st.advance(X, times[sp] - t, params.dt_cap, params.safety);
    t = std::max(t, times[sp]);
    sol.t.push_back(times[sp]);
    sol.X.push_back(X);
  }
  if (t < t_end) st.advance(X, t_end - t, params.dt_cap, params.safety);
  return sol;
}

namespace {

double coverage_weight(std::span<const double> u, std::size_t k) {
  const std::size_t n = u.size();
  if (k == 0) return 0.5 * (u[0] + u[1]);
  if (k + 1 == n) return 1.0 - 0.5 * (u[n - 1] + u[n - 2]);
  return 0.5 * (u[k + 1] - u[k - 1]);
}

double central_slope(std::span<const double> u, std::span<const double> v,
                     std::size_t k) {
  const std::size_t n = u.size();
  if (k == 0) return (v[1] - v[0]) / (u[1] - u[0]);
  if (k + 1 == n) return (v[n - 1] - v[n - 2]) / (u[n - 1] - u[n - 2]);
  return (v[k + 1] - v[k - 1]) / (u[k + 1] - u[k - 1]);
}

} // namespace

double dissipation_rate(const CoefficientModel& m, double p,
                        std::span<const double> u, std::span<const double> X,
                        std::span<const double> Y) {
  const std::size_t n = u.size();
  if (!(p >= 2.0)) throw std::invalid_argument("dissipation_rate: p must be >= 2");
  if (n < 3 || X.size() != n || Y.size() != n)
    throw std::invalid_argument("dissipation_rate: need 3+ shared rank nodes");
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(u[k] > u[k - 1]))
      throw std::invalid_argument("dissipation_rate: ranks must increase");
    const double Xu = central_slope(u, X, k);
    const double Yu = central_slope(u, Y, k);
    if (!(Xu > 0.0) || !(Yu > 0.0))
      throw PdeError("dissipation_rate: quantile curve is not increasing");
    const double D = X[k] - Y[k];
    const double g = Xu - Yu;
    const double pw = (p == 2.0) ? 1.0 : std::pow(std::abs(D), p - 2.0);
    acc += coverage_weight(u, k) * pw * m.a(u[k]) * g * g / (Xu * Yu);
  }
  return 0.5 * p * (p - 1.0) * acc;
}

DissipationReport dissipation_identity_check(
    const CoefficientModel& m, double p,
    const std::function<double(double)>& finv0_F,
    const std::function<double(double)>& finv0_G, double t1, double t2,
    const QuantileParams& params) {
  if (!(t1 >= 0.0) || !(t2 > t1))
    throw std::invalid_argument("dissipation_identity_check: need 0 <= t1 < t2");
  QuantileStepper st(m, params.count);
  const auto& u = st.ranks();
  const std::size_t n = u.size();
  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = finv0_F(u[i]);
    Y[i] = finv0_G(u[i]);
    if (!std::isfinite(X[i]) || !std::isfinite(Y[i]) ||
        (i > 0 && (!(X[i] > X[i - 1]) || !(Y[i] > Y[i - 1]))))
      throw std::invalid_argument(
          "dissipation_identity_check: initial quantiles must be strictly "
          "increasing on the rank grid");
  }
  const auto wpp = [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += coverage_weight(u, k) * std::pow(std::abs(X[k] - Y[k]), p);
    return s;
  };
  std::vector<double> saveX, saveY;
  // both curves move with one shared substep sequence so the trapezoid
  // accumulation sees matching states
  const auto shared_advance = [&](double span_t, bool accumulate,
                                  double& integral) {
    double remaining = span_t;
    double rate_prev =
        accumulate ? dissipation_rate(m, p, u, X, Y) : 0.0;
    while (remaining > 0.0) {
      double h = std::min({st.stable_dt(X, params.safety),
                           st.stable_dt(Y, params.safety), params.dt_cap,
                           remaining});
      saveX = X;
      saveY = Y;
      while (true) {
        const bool okX = st.try_substep(X, h);
        const bool okY = okX && st.try_substep(Y, h);
        if (okX && okY) break;
        if (okX) X = saveX; // roll back the half that moved
        h *= 0.5;
        if (h < params.dt_cap / 1024.0)
          throw PdeError("dissipation_identity_check: substep floor reached");
      }
      remaining -= h;
      if (remaining < 1e-14 * span_t) remaining = 0.0;
      if (accumulate) {
        const double rate_cur = dissipation_rate(m, p, u, X, Y);
        integral += 0.5 * h * (rate_prev + rate_cur);
        rate_prev = rate_cur;
      }
    }
  };
  DissipationReport rep;
  double integral = 0.0;
  if (t1 > 0.0) shared_advance(t1, false, integral);
  rep.wpp_t1 = wpp();
  shared_advance(t2 - t1, true, integral);
  rep.wpp_t2 = wpp();
  rep.lhs = rep.wpp_t2 - rep.wpp_t1;
  rep.rhs = -integral;
  const double denom = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.rel_err = denom > 0.0 ? std::abs(rep.lhs - rep.rhs) / denom : 0.0;
  return rep;
}

double weighted_l2(const std::function<double(double)>& F,
                   const std::function<double(double)>& G,
                   const std::function<double(double)>& weight, double x_lo,
                   double x_hi, std::size_t nodes) {
  if (nodes < 2) throw std::invalid_argument("weighted_l2: nodes < 2");
  if (!(x_hi > x_lo)) throw std::invalid_argument("weighted_l2: empty domain");
  const double dx = (x_hi - x_lo) / static_cast<double>(nodes - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    const double x = x_lo + static_cast<double>(j) * dx;
    const double w = weight(x);
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument(
          "weighted_l2: weight must be finite and positive on the grid");
    const double d = F(x) - G(x);
    const double v = d * d / (2.0 * w);
    acc += (j == 0 || j + 1 == nodes) ? 0.5 * v : v;
  }
  return acc * dx;
}

void write_csv(const GridSolution& sol, const std::string& path) {
  csv::Writer w(path, {"t", "x", "F"});
  for (std::size_t s = 0; s < sol.t.size(); ++s)
    for (std::size_t j = 0; j < sol.x.size(); ++j)
      w.row({csv::fmt(sol.t[s]), csv::fmt(sol.x[j]), csv::fmt(sol.F[s][j])});
}

void write_csv(const QuantileSolution& sol, const std::string& path) {
  csv::Writer w(path, {"t", "u", "X"});
  for (std::size_t s = 0; s < sol.t.size(); ++s)
    for (std::size_t k = 0; k < sol.u.size(); ++k)
      w.row({csv::fmt(sol.t[s]), csv::fmt(sol.u[k]), csv::fmt(sol.X[s][k])});
}

std::function<double(double)> stationary_density(const CoefficientModel& m,
                                                 double xbar) {
  auto cdf = stationary_cdf(m, xbar);
  const CoefficientModel* mp = &m; // model must outlive the callable
  return [cdf, mp](double x) {
    const double u = cdf(x);
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 2.0 * mp->B(u) / mp->a(u);
  };
}

} // namespace rankdiff
