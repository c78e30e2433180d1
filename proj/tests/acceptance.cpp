#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "rankdiff/distributions.hpp"
#include "rankdiff/kernels.hpp"
#include "rankdiff/measure.hpp"
#include "rankdiff/model.hpp"
#include "rankdiff/particle.hpp"
#include "rankdiff/pde.hpp"
#include "rankdiff/rng.hpp"
#include "rankdiff/stationary.hpp"

// End-to-end acceptance checks.  Each case prints exactly one PASS/FAIL line
// with its pinned tolerance so a log scrape shows the whole matrix at a
// glance; the doctest assertion carries the same condition.

using namespace rankdiff;

namespace {

void report(const char* id, bool ok, const char* detail) {
  std::printf("[acceptance] %s %s  %s\n", id, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
}

QuantileProfile invert_grid_cdf(const std::vector<double>& x,
                                const std::vector<double>& F) {
  std::vector<double> grid, value;
  grid.reserve(x.size());
  value.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (F[j] <= 0.0 || F[j] >= 1.0) continue;
    if (!grid.empty() && F[j] <= grid.back() + 1e-13) continue;
    grid.push_back(F[j]);
    value.push_back(x[j]);
  }
  return make_profile(std::move(grid), std::move(value));
}

} // namespace

TEST_CASE("A1 coupled particle transport cost never increases") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  auto qF = [](double u) { return dist::normal_quantile(u); };
  auto qG = [](double u) { return -2.0 + 4.0 * u; };
  std::vector<double> ps{1.0, 2.0, 4.0};
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimConfig cfg;
    cfg.n = 1000;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.seed = 1000 + seed;
    std::vector<double> last(ps.size(), std::numeric_limits<double>::infinity());
    (void)coupled_contraction_run(
        m, qF, qG, cfg, ps, [&](double, std::span<const double> w) {
          for (std::size_t j = 0; j < w.size(); ++j) {
            if (w[j] > last[j] + 1e-12 * (1.0 + last[j])) ++violations;
            last[j] = w[j];
          }
        });
  }
  const bool ok = violations == 0;
  report("A1", ok,
         "per-step (1/n) sum |yF-yG|^p nonincreasing, p in {1,2,4}, n=1000, "
         "dt=1e-3, T=2, 20 seeds, slack 1e-12*(1+w)");
  CHECK(violations == 0);
}

TEST_CASE("A2 two transport-cost routes agree on random atomic laws") {
  const auto key = rng::stream_key(7071, rng::kScratchDomain, 11);
  std::uint64_t ctr = 0;
  auto draw_cdf = [&]() {
    const int k = 2 + static_cast<int>(rng::uniform(key, ctr++) * 7.0);
    std::vector<double> loc(k), mass(k);
    double prev = -5.0 + 2.0 * rng::uniform(key, ctr++);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      prev += 0.05 + 2.0 * rng::uniform(key, ctr++);
      loc[i] = prev;
      mass[i] = 0.05 + rng::uniform(key, ctr++);
      total += mass[i];
    }
    for (double& w : mass) w /= total;
    return StepCDF::from_atoms(std::move(loc), std::move(mass));
  };
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    auto F = draw_cdf();
    auto G = draw_cdf();
    for (double p : {2.0, 3.0, 4.0}) {
      const double a = wasserstein_pp_quantile(F, G, p);
      const double b = wasserstein_pp_double_integral(F, G, p);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  }
  const bool ok = worst <= 1e-8;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "quantile vs double-integral route, 500 random pairs, p in "
                "{2,3,4}: worst rel diff %.2e <= 1e-8",
                worst);
  report("A2", ok, detail);
  CHECK(ok);
}

TEST_CASE("A3 closed-form stationary law matches its defining model") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {.sigma2 = 1.0});
  auto prof = build_stationary(m);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = -6.0 + 12.0 * (k + 0.5) / 1000.0;
    const double u = prof->psi_inverse(x);
    worst = std::max(worst, std::abs(u - 1.0 / (1.0 + std::exp(-2.0 * x))));
  }
  const double moment_err = std::abs(prof->first_abs_moment - std::log(2.0));
  const bool ok = worst <= 1e-8 && moment_err <= 1e-6;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "sup |Psi^-1 - logistic cdf| = %.2e <= 1e-8 on [-6,6] (1000 "
                "pts); | E|X| - ln 2 | = %.2e <= 1e-6",
                worst, moment_err);
  report("A3", ok, detail);
  CHECK(ok);
}

TEST_CASE("A4 ensemble mean is conserved when the drift integrates to zero") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  auto q0 = [](double u) { return dist::normal_quantile(u); };
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimConfig cfg;
    cfg.n = 10000;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.seed = 4000 + seed;
    auto s = simulate(m, q0, cfg);
    const auto& first = s.snapshots.front().positions;
    const auto& last = s.snapshots.back().positions;
    const double m0 = block_sum(first, cfg.exec) / static_cast<double>(cfg.n);
    const double m1 = block_sum(last, cfg.exec) / static_cast<double>(cfg.n);
    worst = std::max(worst, std::abs(m1 - m0));
  }
  const bool ok = worst <= 0.05;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "n=1e4, dt=1e-3, T=1, 10 seeds: worst |mean drift| = %.3f <= 0.05",
                worst);
  report("A4", ok, detail);
  CHECK(ok);
}

TEST_CASE("A5 empirical law settles near the stationary profile") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  auto prof = build_stationary(m);
  auto finv = prof->quantile_profile(0.0);
  auto q0 = [](double u) { return dist::normal_quantile(u); };
  SimConfig cfg;
  cfg.n = 10000;
  cfg.dt = 5e-3;
  cfg.t_end = 10.0;
  cfg.seed = 5001;
  cfg.c_n.c0 = 0.1; // keep the volatility floor from widening the equilibrium
  for (int k = 0; k <= 10; ++k) cfg.snapshot_times.push_back(k);
  auto s = simulate(m, q0, cfg);
  std::vector<double> w2;
  for (const auto& snap : s.snapshots) {
    auto xs = snap.positions;
    std::sort(xs.begin(), xs.end());
    w2.push_back(std::sqrt(wasserstein_pp_samples_vs_profile(xs, finv, 2.0)));
  }
  bool monotone = true;
  for (std::size_t k = 1; k + 1 < w2.size(); ++k)
    monotone = monotone && (w2[k + 1] <= w2[k] + 0.02);
  const bool ok = monotone && w2.back() <= 0.1;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "n=1e4, dt=5e-3, c_n=0.1*n^-1/4: W2(t=1..10) nonincreasing "
                "within +0.02 (%s), final W2 = %.3f <= 0.1",
                monotone ? "yes" : "no", w2.back());
  report("A5", ok, detail);
  CHECK(ok);
}

TEST_CASE("A6 transport drop balances the integrated dissipation rate") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  auto prof = build_stationary(m);
  auto fF = [](double u) { return 1.5 * dist::normal_quantile(u); };
  auto fG = [&prof](double u) { return prof->psi(u); };
  QuantileParams qp;
  qp.count = 512;
  qp.dt_cap = 1e-3;
  auto rep = dissipation_identity_check(m, 2.0, fF, fG, 0.05, 1.0, qp);
  const bool ok = rep.rel_err <= 0.05;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "p=2, gaussian vs stationary, [t1,t2]=[0.05,1], 512 ranks: "
                "lhs=%.5f rhs=%.5f rel err %.4f <= 0.05",
                rep.lhs, rep.rhs, rep.rel_err);
  report("A6", ok, detail);
  CHECK(ok);
}

TEST_CASE("A7 empirical laws approach the pde solution as n grows") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  const double T = 1.0;
  FdParams fp;
  fp.x_lo = -8.0;
  fp.x_hi = 8.0;
  fp.nodes = 801;
  fp.dt = 2e-4;
  auto F0 = [](double x) { return dist::normal_cdf(x); };
  std::vector<double> snaps{T};
  auto ref = fd_solve(m, F0, T, fp, snaps);
  auto ref_q = invert_grid_cdf(ref.x, ref.F.back());
  auto q0 = [](double u) { return dist::normal_quantile(u); };
  std::vector<std::size_t> ns{100, 1000, 10000};
  std::vector<double> mean_w1;
  for (std::size_t n : ns) {
    double acc = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SimConfig cfg;
      cfg.n = n;
      cfg.dt = 1e-3;
      cfg.t_end = T;
      cfg.seed = 7000 + seed;
      cfg.snapshot_times = {T};
      auto s = simulate(m, q0, cfg);
      acc += wasserstein_pp_samples_vs_profile(s.snapshots.back().positions,
                                               ref_q, 1.0);
    }
    mean_w1.push_back(acc / 10.0);
  }
  const bool ok = mean_w1[1] < mean_w1[0] && mean_w1[2] < mean_w1[1];
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "mean W1 to fd reference over 10 seeds at T=1: n=1e2: %.4f, "
                "n=1e3: %.4f, n=1e4: %.4f (strictly decreasing)",
                mean_w1[0], mean_w1[1], mean_w1[2]);
  report("A7", ok, detail);
  CHECK(ok);
}

TEST_CASE("A8 plateau family is weakly stationary for the degenerate model") {
  auto m = make_builtin(BuiltinKind::DegenerateDemo, {});
  auto fns = make_bump_family(20, -2.0, 3.0);
  double worst = 0.0;
  for (double h : {0.0, 0.5, 1.0}) {
    auto F = [h](double x) { return degenerate_family_cdf(h, x); };
    worst = std::max(worst, stationary_residual(m, F, fns));
  }
  const bool ok = worst <= 1e-6;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "h in {0, 0.5, 1}, 20 bump test functions on [-2,3]: worst "
                "weak-form residual %.2e <= 1e-6",
                worst);
  report("A8", ok, detail);
  CHECK(ok);
}

TEST_CASE("A9 grid solver and quantile solver agree through the cdf") {
  auto m = make_builtin(BuiltinKind::LogisticDemo, {});
  const double T = 1.0;
  FdParams fp;
  fp.x_lo = -8.0;
  fp.x_hi = 8.0;
  fp.nodes = 801;
  fp.dt = 2e-4;
  auto F0 = [](double x) { return dist::normal_cdf(x); };
  std::vector<double> snaps{T};
  auto fd = fd_solve(m, F0, T, fp, snaps);
  QuantileParams qp;
  qp.count = 512;
  qp.dt_cap = 1e-3;
  auto finv0 = [](double u) { return dist::normal_quantile(u); };
  auto qs = quantile_pde_solve(m, finv0, T, qp, snaps);
  double sup = 0.0;
  for (std::size_t k = 0; k < qs.u.size(); ++k) {
    const double u = qs.u[k];
    if (u < 0.1 || u > 0.9) continue;
    sup = std::max(sup, std::abs(fd.eval(0, qs.X[0][k]) - u));
  }
  const bool ok = sup <= 1e-2;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "sup_{u in [0.1,0.9]} |F_fd(X_u(T)) - u| = %.4f <= 1e-2 at T=1",
                sup);
  report("A9", ok, detail);
  CHECK(ok);
}
