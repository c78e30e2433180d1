#include "rankdiff/particle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rankdiff/csv.hpp"
#include "rankdiff/kernels.hpp"
#include "rankdiff/rng.hpp"

namespace rankdiff {

namespace {

void check_finite(std::span<const double> x, double t, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw SimulationError(std::string(what) + ": non-finite position at index " +
                            std::to_string(i) + ", t=" + std::to_string(t));
  }
}

// per-rank coefficient tables: slot k holds the values for rank (k+1)/n
void build_rank_tables(const CoefficientModel& m, std::size_t n, double c_n,
                       std::vector<double>& drift, std::vector<double>& vol) {
  drift.resize(n);
  vol.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = static_cast<double>(k + 1) / static_cast<double>(n);
    drift[k] = m.b(r);
    vol[k] = c_n + m.sigma(r);
  }
}

void validate_config(const SimConfig& c) {
  if (c.n == 0) throw std::invalid_argument("SimConfig: n must be >= 1");
  if (!(c.dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(c.t_end >= 0.0)) throw std::invalid_argument("SimConfig: t_end must be >= 0");
  for (double s : c.snapshot_times)
    if (s < -1e-12 || s > c.t_end + 1e-12)
      throw std::invalid_argument("SimConfig: snapshot time outside [0, t_end]");
}

std::vector<double> effective_snapshots(const SimConfig& c) {
  std::vector<double> times = c.snapshot_times;
  if (times.empty()) {
    times.push_back(0.0);
    if (c.t_end > 0.0) times.push_back(c.t_end);
  }
  std::sort(times.begin(), times.end());
  return times;
}

std::vector<double> init_uniforms(const SimConfig& c) {
  std::vector<double> u(c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    u[i] = rng::uniform_open(rng::stream_key(c.seed, rng::kInitDomain, i), 0);
  return u;
}

} // namespace

double CnRule::of(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("CnRule: n must be >= 1");
  double c;
  if (kind == Kind::Power)
    c = c0 * std::pow(static_cast<double>(n), -alpha);
  else
    c = value;
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("CnRule: c_n must be finite and >= 0");
  return c;
}

std::vector<double> rank_fractions(std::span<const double> positions) {
  const std::size_t n = positions.size();
  if (n == 0) throw std::invalid_argument("rank_fractions: empty ensemble");
  const auto idx = kernels::argsort(positions);
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k)
    r[idx[k]] = static_cast<double>(k + 1) / static_cast<double>(n);
  return r;
}

Ensemble init_ensemble(const std::function<double(double)>& quantile_of_m,
                       const SimConfig& config) {
  validate_config(config);
  auto u = init_uniforms(config);
  if (config.init == InitMode::Stratified) std::sort(u.begin(), u.end());
  Ensemble e;
  e.time = 0.0;
  e.c_n = config.c_n.of(config.n);
  e.positions.resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i)
    e.positions[i] = quantile_of_m(u[i]);
  check_finite(e.positions, 0.0, "init_ensemble");
  return e;
}

void em_step(const CoefficientModel& model, Ensemble& e, double dt,
             std::span<const double> gaussians, ExecPolicy pol) {
  const std::size_t n = e.positions.size();
  if (gaussians.size() != n)
    throw std::invalid_argument("em_step: gaussians size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be > 0");
  const auto idx = kernels::argsort(e.positions);
  std::vector<double> drift, vol;
  build_rank_tables(model, n, e.c_n, drift, vol);
  kernels::ranked_update(e.positions, idx, drift, vol, dt, std::sqrt(dt),
                         gaussians, pol);
  e.time += dt;
  check_finite(e.positions, e.time, "em_step");
}

void reordered_step(const CoefficientModel& model, std::vector<double>& sorted,
                    double c_n, double dt, std::span<const double> gaussians,
                    ExecPolicy pol) {
  const std::size_t n = sorted.size();
  if (gaussians.size() != n)
    throw std::invalid_argument("reordered_step: gaussians size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("reordered_step: dt must be > 0");
  assert(std::is_sorted(sorted.begin(), sorted.end()));
  std::vector<double> drift, vol;
  build_rank_tables(model, n, c_n, drift, vol);
  kernels::sorted_update(sorted, drift, vol, dt, std::sqrt(dt), gaussians, pol);
  std::sort(sorted.begin(), sorted.end());
  check_finite(sorted, 0.0, "reordered_step");
}

SnapshotSeries simulate(const CoefficientModel& model,
                        const std::function<double(double)>& quantile_of_m,
                        const SimConfig& config) {
  validate_config(config);
  Ensemble e = init_ensemble(quantile_of_m, config);
  if (config.system == SystemKind::Reordered)
    std::sort(e.positions.begin(), e.positions.end());
  const auto times = effective_snapshots(config);
  SnapshotSeries out;
  std::size_t sp = 0;
  const double half = 0.5 * config.dt + 1e-12;
  while (sp < times.size() && times[sp] <= half) {
    out.snapshots.push_back(e);
    ++sp;
  }
  const std::size_t n = config.n;
  std::vector<double> drift, vol;
  build_rank_tables(model, n, e.c_n, drift, vol);
  std::vector<double> g(n);
  std::uint64_t step = 0;
  double t = 0.0;
  while (t < config.t_end - 1e-12 * std::max(1.0, config.t_end)) {
    const double t_next =
        std::min(static_cast<double>(step + 1) * config.dt, config.t_end);
    const double dt_step = t_next - t;
    kernels::gaussian_fill(g, config.seed, rng::kStepDomain, step, config.exec);
    if (config.system == SystemKind::Interacting) {
      const auto idx = kernels::argsort(e.positions);
      kernels::ranked_update(e.positions, idx, drift, vol, dt_step,
                             std::sqrt(dt_step), g, config.exec);
    } else {
      kernels::sorted_update(e.positions, drift, vol, dt_step,
                             std::sqrt(dt_step), g, config.exec);
      std::sort(e.positions.begin(), e.positions.end());
    }
    ++step;
    t = t_next;
    e.time = t;
    check_finite(e.positions, t, "simulate");
    while (sp < times.size() && times[sp] <= t + half) {
      out.snapshots.push_back(e);
      ++sp;
    }
  }
  return out;
}

void SnapshotSeries::write_csv(const std::string& path) const {
  csv::Writer w(path, {"t", "i", "position"});
  for (const auto& snap : snapshots)
    for (std::size_t i = 0; i < snap.positions.size(); ++i)
      w.row({csv::fmt(snap.time), csv::fmt(i), csv::fmt(snap.positions[i])});
}

CoupledState init_coupled(const std::function<double(double)>& quantile_F0,
                          const std::function<double(double)>& quantile_G0,
                          const SimConfig& config) {
  validate_config(config);
  auto u = init_uniforms(config);
  std::sort(u.begin(), u.end()); // both systems share the sorted uniforms
  CoupledState s;
  s.time = 0.0;
  s.c_n = config.c_n.of(config.n);
  s.seed = config.seed;
  s.step = 0;
  s.yF.resize(config.n);
  s.yG.resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    s.yF[i] = quantile_F0(u[i]);
    s.yG[i] = quantile_G0(u[i]);
  }
  std::sort(s.yF.begin(), s.yF.end()); // quantiles are monotone; make exact
  std::sort(s.yG.begin(), s.yG.end());
  check_finite(s.yF, 0.0, "init_coupled");
  check_finite(s.yG, 0.0, "init_coupled");
  return s;
}

void coupled_step(const CoefficientModel& model, CoupledState& s, double dt,
                  ExecPolicy pol) {
  const std::size_t n = s.yF.size();
  if (n != s.yG.size())
    throw std::invalid_argument("coupled_step: size mismatch");
  std::vector<double> g(n), drift, vol;
  kernels::gaussian_fill(g, s.seed, rng::kStepDomain, s.step, pol);
  build_rank_tables(model, n, s.c_n, drift, vol);
  const double sqdt = std::sqrt(dt);
  kernels::sorted_update(s.yF, drift, vol, dt, sqdt, g, pol);
  kernels::sorted_update(s.yG, drift, vol, dt, sqdt, g, pol);
  std::sort(s.yF.begin(), s.yF.end());
  std::sort(s.yG.begin(), s.yG.end());
  ++s.step;
  s.time += dt;
  check_finite(s.yF, s.time, "coupled_step");
  check_finite(s.yG, s.time, "coupled_step");
}

namespace {

// mean p-th power gap of two aligned sorted states, one value per p
void gap_powers(const CoupledState& s, std::span<const double> p_list,
                ExecPolicy pol, std::vector<double>& out) {
  const std::size_t n = s.yF.size();
  std::vector<double> gap(n);
  const bool par = (pol == ExecPolicy::Parallel);
#pragma omp parallel for if (par) schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    gap[static_cast<std::size_t>(i)] =
        std::abs(s.yF[static_cast<std::size_t>(i)] -
                 s.yG[static_cast<std::size_t>(i)]);
  out.resize(p_list.size());
  std::vector<double> powered(n);
  for (std::size_t j = 0; j < p_list.size(); ++j) {
    const double p = p_list[j];
#pragma omp parallel for if (par) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      powered[static_cast<std::size_t>(i)] =
          std::pow(gap[static_cast<std::size_t>(i)], p);
    out[j] = block_sum(powered, pol) / static_cast<double>(n);
  }
}

} // namespace

std::vector<ContractionRow> coupled_contraction_run(
    const CoefficientModel& model,
    const std::function<double(double)>& quantile_F0,
    const std::function<double(double)>& quantile_G0, const SimConfig& config,
    std::span<const double> p_list,
    const std::function<void(double, std::span<const double>)>& per_step) {
  if (p_list.empty())
    throw std::invalid_argument("coupled_contraction_run: empty p list");
  for (double p : p_list)
    if (!(p >= 1.0))
      throw std::invalid_argument("coupled_contraction_run: p must be >= 1");
  CoupledState s = init_coupled(quantile_F0, quantile_G0, config);
  const auto times = effective_snapshots(config);
  std::vector<ContractionRow> rows;
  std::vector<double> wpp;
  gap_powers(s, p_list, config.exec, wpp);
  if (per_step) per_step(0.0, wpp);
  std::size_t sp = 0;
  const double half = 0.5 * config.dt + 1e-12;
  auto record = [&](double t) {
    while (sp < times.size() && times[sp] <= t + half) {
      for (std::size_t j = 0; j < p_list.size(); ++j)
        rows.push_back({t, p_list[j], wpp[j]});
      ++sp;
    }
  };
  record(0.0);
  double t = 0.0;
  std::uint64_t step = 0;
  while (t < config.t_end - 1e-12 * std::max(1.0, config.t_end)) {
    const double t_next =
        std::min(static_cast<double>(step + 1) * config.dt, config.t_end);
    coupled_step(model, s, t_next - t, config.exec);
    ++step;
    t = t_next;
    gap_powers(s, p_list, config.exec, wpp);
    if (per_step) per_step(t, wpp);
    record(t);
  }
  return rows;
}

} // namespace rankdiff
