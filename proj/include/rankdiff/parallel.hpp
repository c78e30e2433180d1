#pragma once

#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rankdiff {

// Execution policy for the hot kernels.  Serial is the reference
// implementation; Parallel runs the same loop body under OpenMP.
// Every kernel is elementwise or uses the fixed-block reduction below,
// so both policies produce bit-identical results for any thread count.
enum class ExecPolicy { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {
constexpr std::size_t kBlock = 4096; // reduction block size, fixed for determinism
}

// Deterministic sum: per-block partial sums (parallelizable, each block is a
// fixed serial order) combined left to right.  Result does not depend on the
// thread count, unlike a bare OpenMP reduction.
inline double block_sum(std::span<const double> v, ExecPolicy pol) {
  const std::size_t n = v.size();
  const std::size_t nb = (n + detail::kBlock - 1) / detail::kBlock;
  if (nb <= 1) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::vector<double> partial(nb, 0.0);
  const bool par = (pol == ExecPolicy::Parallel);
#pragma omp parallel for if (par) schedule(static)
  for (long long b = 0; b < static_cast<long long>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * detail::kBlock;
    const std::size_t hi = lo + detail::kBlock < n ? lo + detail::kBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

} // namespace rankdiff
