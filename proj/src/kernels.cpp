#include "rankdiff/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "rankdiff/rng.hpp"

namespace rankdiff::kernels {

namespace serial {

void gaussian_fill(std::span<double> g, std::uint64_t seed, std::uint64_t domain,
                   std::uint64_t counter) {
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = rng::gaussian(rng::stream_key(seed, domain, i), counter);
}

void ranked_update(std::span<double> x, std::span<const std::uint32_t> idx,
                   std::span<const double> drift, std::span<const double> vol,
                   double dt, double sqdt, std::span<const double> g) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::uint32_t i = idx[k];
    x[i] += drift[k] * dt + vol[k] * sqdt * g[i];
  }
}

void sorted_update(std::span<double> y, std::span<const double> drift,
                   std::span<const double> vol, double dt, double sqdt,
                   std::span<const double> g) {
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] += drift[k] * dt + vol[k] * sqdt * g[k];
}

} // namespace serial

namespace par {

void gaussian_fill(std::span<double> g, std::uint64_t seed, std::uint64_t domain,
                   std::uint64_t counter) {
  const long long n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = rng::gaussian(
        rng::stream_key(seed, domain, static_cast<std::uint64_t>(i)), counter);
}

void ranked_update(std::span<double> x, std::span<const std::uint32_t> idx,
                   std::span<const double> drift, std::span<const double> vol,
                   double dt, double sqdt, std::span<const double> g) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < n; ++k) {
    const std::uint32_t i = idx[static_cast<std::size_t>(k)];
    x[i] += drift[static_cast<std::size_t>(k)] * dt +
            vol[static_cast<std::size_t>(k)] * sqdt * g[i];
  }
}

void sorted_update(std::span<double> y, std::span<const double> drift,
                   std::span<const double> vol, double dt, double sqdt,
                   std::span<const double> g) {
  const long long n = static_cast<long long>(y.size());
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < n; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    y[i] += drift[i] * dt + vol[i] * sqdt * g[i];
  }
}

} // namespace par

std::vector<std::uint32_t> argsort(std::span<const double> positions) {
  std::vector<std::uint32_t> idx(positions.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&positions](std::uint32_t a, std::uint32_t b) {
    if (positions[a] != positions[b]) return positions[a] < positions[b];
    return a < b; // ties by particle index
  });
  return idx;
}

} // namespace rankdiff::kernels
