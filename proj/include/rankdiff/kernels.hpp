#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankdiff/parallel.hpp"

namespace rankdiff::kernels {

// Hot inner loops of the particle systems, each in two variants: a plain
// serial reference and an OpenMP version.  Both are elementwise over
// distinct indices, so outputs are bit-identical; tests compare the two and
// the benchmark times them.

namespace serial {

// g[i] = standard normal draw for substream i at the given counter
void gaussian_fill(std::span<double> g, std::uint64_t seed, std::uint64_t domain,
                   std::uint64_t counter);

// particle at sort position k (index idx[k]) moves with the rank-k
// coefficients: x[idx[k]] += drift[k]*dt + vol[k]*sqdt*g[idx[k]]
void ranked_update(std::span<double> x, std::span<const std::uint32_t> idx,
                   std::span<const double> drift, std::span<const double> vol,
                   double dt, double sqdt, std::span<const double> g);

// already-sorted state: slot k IS rank k: y[k] += drift[k]*dt + vol[k]*sqdt*g[k]
void sorted_update(std::span<double> y, std::span<const double> drift,
                   std::span<const double> vol, double dt, double sqdt,
                   std::span<const double> g);

} // namespace serial

namespace par {

void gaussian_fill(std::span<double> g, std::uint64_t seed, std::uint64_t domain,
                   std::uint64_t counter);
void ranked_update(std::span<double> x, std::span<const std::uint32_t> idx,
                   std::span<const double> drift, std::span<const double> vol,
                   double dt, double sqdt, std::span<const double> g);
void sorted_update(std::span<double> y, std::span<const double> drift,
                   std::span<const double> vol, double dt, double sqdt,
                   std::span<const double> g);

} // namespace par

inline void gaussian_fill(std::span<double> g, std::uint64_t seed,
                          std::uint64_t domain, std::uint64_t counter,
                          ExecPolicy pol) {
  if (pol == ExecPolicy::Parallel)
    par::gaussian_fill(g, seed, domain, counter);
  else
    serial::gaussian_fill(g, seed, domain, counter);
}

inline void ranked_update(std::span<double> x, std::span<const std::uint32_t> idx,
                          std::span<const double> drift,
                          std::span<const double> vol, double dt, double sqdt,
                          std::span<const double> g, ExecPolicy pol) {
  if (pol == ExecPolicy::Parallel)
    par::ranked_update(x, idx, drift, vol, dt, sqdt, g);
  else
    serial::ranked_update(x, idx, drift, vol, dt, sqdt, g);
}

inline void sorted_update(std::span<double> y, std::span<const double> drift,
                          std::span<const double> vol, double dt, double sqdt,
                          std::span<const double> g, ExecPolicy pol) {
  if (pol == ExecPolicy::Parallel)
    par::sorted_update(y, drift, vol, dt, sqdt, g);
  else
    serial::sorted_update(y, drift, vol, dt, sqdt, g);
}

// ascending argsort of positions with ties broken by index (stable order)
std::vector<std::uint32_t> argsort(std::span<const double> positions);

} // namespace rankdiff::kernels
