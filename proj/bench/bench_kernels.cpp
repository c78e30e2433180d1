// Times the serial kernels against the OpenMP ones on growing problem
// sizes.  Plain wall-clock over repeated calls; prints one line per case.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "rankdiff/kernels.hpp"
#include "rankdiff/model.hpp"
#include "rankdiff/parallel.hpp"
#include "rankdiff/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(int reps, const std::function<void()>& body) {
  body(); // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) body();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, std::size_t n, double serial_ms, double par_ms) {
  std::printf(
      "%-14s n=%-8zu serial %10.3f ms   parallel %10.3f ms   speedup %5.2fx\n",
      name, n, serial_ms, par_ms, serial_ms / par_ms);
}

} // namespace

int main() {
  using namespace rankdiff;
  const auto model = make_builtin(BuiltinKind::LogisticDemo, {});
  std::printf("threads available: %d\n", max_threads());

  for (const std::size_t n :
       {std::size_t{10000}, std::size_t{100000}, std::size_t{1000000}}) {
    const int reps = n >= 1000000 ? 5 : 20;
    const double dt = 1e-3;
    const double sqdt = std::sqrt(dt);
    std::vector<double> g(n), pos(n), drift(n), vol(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u =
          (static_cast<double>(i) + 1.0) / (static_cast<double>(n) + 1.0);
      pos[i] = 4.0 * u - 2.0;
      drift[i] = model.b(u);
      vol[i] = model.sigma(u) + 0.05;
    }
    kernels::serial::gaussian_fill(g, 42, rng::kStepDomain, 3);
    const auto idx = kernels::argsort(pos);

    report("gaussian_fill", n,
           time_ms(reps,
                   [&] { kernels::serial::gaussian_fill(g, 42, rng::kStepDomain, 3); }),
           time_ms(reps,
                   [&] { kernels::par::gaussian_fill(g, 42, rng::kStepDomain, 3); }));

    std::vector<double> work = pos;
    const auto reset = [&] { std::copy(pos.begin(), pos.end(), work.begin()); };
    report("ranked_update", n,
           time_ms(reps,
                   [&] {
                     reset();
                     kernels::serial::ranked_update(work, idx, drift, vol, dt,
                                                    sqdt, g);
                   }),
           time_ms(reps, [&] {
             reset();
             kernels::par::ranked_update(work, idx, drift, vol, dt, sqdt, g);
           }));

    report("sorted_update", n,
           time_ms(reps,
                   [&] {
                     reset();
                     kernels::serial::sorted_update(work, drift, vol, dt, sqdt,
                                                    g);
                   }),
           time_ms(reps, [&] {
             reset();
             kernels::par::sorted_update(work, drift, vol, dt, sqdt, g);
           }));

    report("block_sum", n,
           time_ms(reps, [&] { block_sum(g, ExecPolicy::Serial); }),
           time_ms(reps, [&] { block_sum(g, ExecPolicy::Parallel); }));
  }
  return 0;
}
