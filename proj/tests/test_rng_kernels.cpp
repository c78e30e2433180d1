#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rankdiff/kernels.hpp"
#include "rankdiff/parallel.hpp"
#include "rankdiff/rng.hpp"

using namespace rankdiff;

TEST_CASE("counter streams are pure functions of their ids") {
  const auto k1 = rng::stream_key(42, rng::kInitDomain, 7);
  const auto k2 = rng::stream_key(42, rng::kInitDomain, 7);
  CHECK(k1 == k2);
  CHECK(rng::bits(k1, 3) == rng::bits(k2, 3));
  // any id change moves the key
  CHECK(k1 != rng::stream_key(43, rng::kInitDomain, 7));
  CHECK(k1 != rng::stream_key(42, rng::kStepDomain, 7));
  CHECK(k1 != rng::stream_key(42, rng::kInitDomain, 8));
  // out-of-order access sees the same values as sequential access
  const double v5 = rng::uniform(k1, 5);
  (void)rng::uniform(k1, 0);
  CHECK(rng::uniform(k1, 5) == v5);
}

TEST_CASE("uniform variants respect their ranges") {
  const auto key = rng::stream_key(1, rng::kScratchDomain, 0);
  for (std::uint64_t c = 0; c < 20000; ++c) {
    const double a = rng::uniform(key, c);
    const double b = rng::uniform_pos(key, c);
    const double o = rng::uniform_open(key, c);
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
    CHECK(o > 0.0);
    CHECK(o < 1.0);
  }
}

TEST_CASE("gaussian moments are sane") {
  const auto key = rng::stream_key(9, rng::kScratchDomain, 4);
  const std::size_t n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rng::gaussian(key, i);
    s1 += g;
    s2 += g * g;
    s4 += g * g * g * g;
  }
  s1 /= n;
  s2 /= n;
  s4 /= n;
  CHECK(std::abs(s1) < 0.01);       // mean 0, se ~ 0.0022
  CHECK(s2 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("serial and parallel gaussian fills are bit-identical") {
  std::vector<double> a(10000), b(10000);
  kernels::serial::gaussian_fill(a, 123, rng::kStepDomain, 17);
  kernels::par::gaussian_fill(b, 123, rng::kStepDomain, 17);
  CHECK(a == b);
  // the dispatcher hits the same code paths
  std::vector<double> c(10000);
  kernels::gaussian_fill(c, 123, rng::kStepDomain, 17, ExecPolicy::Parallel);
  CHECK(c == a);
}

TEST_CASE("ranked and sorted updates agree across policies") {
  const std::size_t n = 5000;
  std::vector<double> x(n), drift(n), vol(n), g(n);
  kernels::serial::gaussian_fill(g, 5, rng::kStepDomain, 0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(0.37 * static_cast<double>(i));
    drift[i] = 0.1 + 1e-4 * static_cast<double>(i);
    vol[i] = 0.5 + 1e-4 * static_cast<double>(n - i);
  }
  auto idx = kernels::argsort(x);
  auto xs = x;
  auto xp = x;
  kernels::serial::ranked_update(xs, idx, drift, vol, 1e-3, std::sqrt(1e-3), g);
  kernels::par::ranked_update(xp, idx, drift, vol, 1e-3, std::sqrt(1e-3), g);
  CHECK(xs == xp);
  CHECK(xs != x); // it moved

  auto ys = x;
  auto yp = x;
  kernels::serial::sorted_update(ys, drift, vol, 1e-3, std::sqrt(1e-3), g);
  kernels::par::sorted_update(yp, drift, vol, 1e-3, std::sqrt(1e-3), g);
  CHECK(ys == yp);
}

TEST_CASE("ranked update applies rank coefficients to the right particle") {
  // three particles, position order is (index 1, index 2, index 0)
  std::vector<double> x{3.0, 1.0, 2.0};
  std::vector<double> drift{10.0, 20.0, 30.0};
  std::vector<double> vol{0.0, 0.0, 0.0};
  std::vector<double> g{0.0, 0.0, 0.0};
  auto idx = kernels::argsort(x);
  REQUIRE(idx == std::vector<std::uint32_t>{1, 2, 0});
  kernels::serial::ranked_update(x, idx, drift, vol, 1.0, 1.0, g);
  // lowest particle (index 1) gets drift[0], highest (index 0) gets drift[2]
  CHECK(x[1] == doctest::Approx(1.0 + 10.0));
  CHECK(x[2] == doctest::Approx(2.0 + 20.0));
  CHECK(x[0] == doctest::Approx(3.0 + 30.0));
}

TEST_CASE("argsort breaks ties by index") {
  std::vector<double> x{2.0, 1.0, 2.0, 1.0};
  auto idx = kernels::argsort(x);
  CHECK(idx == std::vector<std::uint32_t>{1, 3, 0, 2});
}

TEST_CASE("block sum is policy- and thread-independent") {
  // size straddles several 4096 blocks with a ragged tail
  const std::size_t n = 3 * 4096 + 1234;
  std::vector<double> v(n);
  const auto key = rng::stream_key(3, rng::kScratchDomain, 9);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = rng::uniform(key, i) - 0.5 + 1e-18 * static_cast<double>(i % 7);
  const double a = block_sum(v, ExecPolicy::Serial);
  const double b = block_sum(v, ExecPolicy::Parallel);
  CHECK(a == b); // bitwise, not approximately
}

TEST_CASE("block sum small input falls back to a plain loop") {
  std::vector<double> v{1.0, 2.0, 3.5};
  CHECK(block_sum(v, ExecPolicy::Parallel) == 6.5);
  CHECK(block_sum(std::vector<double>{}, ExecPolicy::Serial) == 0.0);
}
