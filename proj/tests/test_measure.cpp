#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "rankdiff/distributions.hpp"
#include "rankdiff/measure.hpp"
#include "rankdiff/rng.hpp"

using namespace rankdiff;

TEST_CASE("step cdf from atoms: cdf and strict pseudo-inverse") {
  auto F = StepCDF::from_atoms({1.0, 2.0}, {0.5, 0.5});
  CHECK(F.size() == 2);
  CHECK(F.cdf(0.5) == 0.0);
  CHECK(F.cdf(1.0) == 0.5);
  CHECK(F.cdf(1.5) == 0.5);
  CHECK(F.cdf(2.0) == 1.0);
  CHECK(F.cdf(3.0) == 1.0);
  CHECK(F.quantile(0.25) == 1.0);
  // inf{x : F(x) > u} with strict inequality: at the jump's own level the
  // value is already the next atom
  CHECK(F.quantile(0.5) == 2.0);
  CHECK(F.quantile(0.75) == 2.0);
}

TEST_CASE("step cdf from samples merges ties") {
  std::vector<double> xs{3.0, 1.0, 2.0, 1.0};
  auto F = StepCDF::from_samples(xs);
  REQUIRE(F.size() == 3);
  CHECK(F.location[0] == 1.0);
  CHECK(F.mass[0] == 0.5);
  CHECK(F.mass[1] == 0.25);
  CHECK(F.cumulative[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("step cdf rejects bad atoms") {
  CHECK_THROWS(StepCDF::from_atoms({2.0, 1.0}, {0.5, 0.5}));
  CHECK_THROWS(StepCDF::from_atoms({1.0, 2.0}, {0.5, 0.4}));
  CHECK_THROWS(StepCDF::from_atoms({1.0, 2.0}, {1.5, -0.5}));
}

TEST_CASE("tail function is exactly one at zero") {
  auto F = [](double x) { return x < 0.3 ? 0.2 : 0.9; };
  CHECK(tail_fn(F, 0.0) == 1.0);
  CHECK(tail_fn(F, 1.0) == doctest::Approx(0.1));
  CHECK(tail_fn(F, -1.0) == doctest::Approx(0.2));
}

TEST_CASE("two-atom transport costs in closed form") {
  auto d0 = StepCDF::from_atoms({0.0}, {1.0});
  auto dc = StepCDF::from_atoms({1.7}, {1.0});
  for (double p : {1.0, 2.0, 3.0})
    CHECK(wasserstein_pp_quantile(d0, dc, p) ==
          doctest::Approx(std::pow(1.7, p)).epsilon(1e-14));

  // both quantile gaps are exactly 1, so the cost is 1 for every p
  auto F = StepCDF::from_atoms({0.0, 2.0}, {0.5, 0.5});
  auto G = StepCDF::from_atoms({1.0}, {1.0});
  for (double p : {1.0, 2.0, 4.0})
    CHECK(wasserstein_pp_quantile(F, G, p) == doctest::Approx(1.0).epsilon(1e-14));

  // asymmetric masses: gap 1 on (0,1/4], gap 0 on (1/4,1]
  auto H = StepCDF::from_atoms({-1.0, 0.0}, {0.25, 0.75});
  auto D = StepCDF::from_atoms({0.0}, {1.0});
  CHECK(wasserstein_pp_quantile(H, D, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
}

namespace {

StepCDF random_step_cdf(std::uint64_t key, std::uint64_t& ctr) {
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
  for (double& m : mass) m /= total;
  // from_atoms renormalizes the cumulative to end at 1 within tolerance
  return StepCDF::from_atoms(std::move(loc), std::move(mass));
}

} // namespace

TEST_CASE("quantile route and double-integral route agree on random pairs") {
  const auto key = rng::stream_key(2024, rng::kScratchDomain, 1);
  std::uint64_t ctr = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    auto F = random_step_cdf(key, ctr);
    auto G = random_step_cdf(key, ctr);
    for (double p : {2.0, 3.0, 4.0}) {
      const double a = wasserstein_pp_quantile(F, G, p);
      const double b = wasserstein_pp_double_integral(F, G, p);
      const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("sorted-sample route matches the quantile route") {
  const auto key = rng::stream_key(77, rng::kScratchDomain, 2);
  std::uint64_t ctr = 0;
  const std::size_t n = 64;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 3.0 * rng::gaussian(key, i);
    y[i] = 1.0 + 2.0 * rng::gaussian(key, n + i);
  }
  auto F = StepCDF::from_samples(x);
  auto G = StepCDF::from_samples(y);
  for (double p : {1.0, 2.0, 3.0}) {
    const double a = wasserstein_pp_quantile(F, G, p);
    const double b = wasserstein_pp_sorted(x, y, p);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  ++ctr; (void)ctr;
}

TEST_CASE("sorted route is the mean p-th power gap of order statistics") {
  std::vector<double> x{3.0, 1.0, 2.0};
  std::vector<double> y{0.0, 0.0, 6.0};
  // sorted gaps: |1-0|, |2-0|, |3-6| -> (1 + 4 + 9)/3
  CHECK(wasserstein_pp_sorted(x, y, 2.0) == doctest::Approx(14.0 / 3.0).epsilon(1e-15));
  CHECK(wasserstein_pp_sorted(x, y, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("profile route reproduces gaussian transport costs") {
  auto f1 = tabulate_quantile([](double u) { return 0.3 + dist::normal_quantile(u); });
  auto f2 = tabulate_quantile([](double u) { return -0.5 + 1.7 * dist::normal_quantile(u); });
  const double w22 = wasserstein_pp_quantile(f1, f2, 2.0);
  CHECK(w22 == doctest::Approx(0.8 * 0.8 + 0.7 * 0.7).epsilon(5e-4));

  // E|a + bZ| for the p = 1 cost between the same two gaussians
  const double a = 0.8, b = 0.7;
  const double exact =
      b * std::sqrt(2.0 / std::numbers::pi) * std::exp(-a * a / (2 * b * b)) +
      a * (1.0 - 2.0 * dist::normal_cdf(-a / b));
  CHECK(wasserstein_pp_quantile(f1, f2, 1.0) == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("profile route flags non-integrable quantile gaps") {
  auto c1 = tabulate_quantile([](double u) { return std::tan(std::numbers::pi * (u - 0.5)); });
  auto c2 = tabulate_quantile([](double u) { return 2.0 * std::tan(std::numbers::pi * (u - 0.5)); });
  CHECK(std::isinf(wasserstein_pp_quantile(c1, c2, 2.0)));

  // a constant shift of the same heavy-tailed law stays finite and exact
  auto c3 = tabulate_quantile([](double u) { return 1.5 + std::tan(std::numbers::pi * (u - 0.5)); });
  CHECK(wasserstein_pp_quantile(c1, c3, 2.0) == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("samples vs profile: closed-form panels") {
  // clamped profile: f(u) = 0.25 below 0.25, u on [0.25, 0.75], 0.75 above
  auto f = make_profile({0.25, 0.5, 0.75}, {0.25, 0.5, 0.75});
  std::vector<double> xs{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  // 2 * 0.25 * 0.25^2 + 2 * 0.25^3 / 3
  CHECK(wasserstein_pp_samples_vs_profile(xs, f, 2.0) ==
        doctest::Approx(1.0 / 24.0).epsilon(1e-8));
  // 2 * 0.25 * 0.25 + 0.25^2
  CHECK(wasserstein_pp_samples_vs_profile(xs, f, 1.0) ==
        doctest::Approx(3.0 / 16.0).epsilon(1e-8));
  // shuffled input is sorted internally; each panel splits into a clamped
  // strip of height 0.15 and a linear strip from 0.15 to 0.4
  std::vector<double> ys{0.9, 0.1};
  const double exact = 2.0 * (0.25 * 0.15 * 0.15 +
                              (std::pow(0.4, 3) - std::pow(0.15, 3)) / 3.0);
  CHECK(wasserstein_pp_samples_vs_profile(ys, f, 2.0) ==
        doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("quantile profile interpolation and end behavior") {
  auto f = make_profile({0.25, 0.5, 0.75}, {1.0, 2.0, 3.0});
  CHECK(f(0.5) == 2.0);
  CHECK(f(0.375) == doctest::Approx(1.5).epsilon(1e-15));
  // clamped ends hold the boundary value
  CHECK(f(0.1) == 1.0);
  CHECK(f(0.99) == 3.0);
  auto g = make_profile({0.25, 0.5, 0.75}, {1.0, 2.0, 3.0},
                        EndpointBehavior::Divergent, EndpointBehavior::Divergent);
  // divergent ends extend the end panel's slope (4 per unit u)
  CHECK(g(0.1) == doctest::Approx(1.0 - 0.15 * 4.0).epsilon(1e-12));
  CHECK(g(0.9) == doctest::Approx(3.0 + 0.15 * 4.0).epsilon(1e-12));
}

TEST_CASE("make_profile validates its input") {
  CHECK_THROWS(make_profile({0.5, 0.25}, {1.0, 2.0}));
  CHECK_THROWS(make_profile({0.25, 0.5}, {2.0, 1.0}));
  CHECK_THROWS(make_profile({0.25, 0.5, 0.5}, {1.0, 2.0, 3.0}));
  CHECK_THROWS(make_profile({-0.1, 0.5}, {1.0, 2.0}));
}

TEST_CASE("clustered unit grid shape") {
  auto g = clustered_unit_grid(2048);
  REQUIRE(g.size() == 2048);
  CHECK(g.front() > 0.0);
  CHECK(g.back() < 1.0);
  CHECK(g.front() < 1e-6); // quadratic clustering at the ends
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g[i] + g[g.size() - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("step cdf csv round trip") {
  auto F = StepCDF::from_atoms({-1.25, 0.5, 3.75}, {0.2, 0.3, 0.5});
  const auto path = std::filesystem::temp_directory_path() / "rankdiff_step_cdf.csv";
  write_csv(F, path.string());
  auto G = read_step_cdf_csv(path.string());
  REQUIRE(G.size() == F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    CHECK(G.location[i] == F.location[i]);
    CHECK(G.mass[i] == doctest::Approx(F.mass[i]).epsilon(1e-15));
  }
  std::filesystem::remove(path);
}
