#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankdiff/model.hpp"
#include "rankdiff/parallel.hpp"

namespace rankdiff {

// Raised when a simulation produces a non-finite position or otherwise
// breaks an invariant mid-run; the run's output is not usable.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Extra volatility floor c_n added to every particle's sigma; it vanishes as
// n grows so the particle systems stay well-posed without changing the limit.
struct CnRule {
  enum class Kind { Power, Explicit };
  Kind kind = Kind::Power;
  double c0 = 1.0;    // Power: c_n = c0 * n^(-alpha)
  double alpha = 0.25;
  double value = 0.0; // Explicit
  double of(std::size_t n) const;
};

enum class InitMode { Iid, Stratified };
enum class SystemKind { Interacting, Reordered };

struct SimConfig {
  std::size_t n = 0;
  double dt = 0.0;
  double t_end = 0.0;
  CnRule c_n;
  std::uint64_t seed = 0;
  InitMode init = InitMode::Iid;
  SystemKind system = SystemKind::Interacting;
  std::vector<double> snapshot_times; // defaults to {0, t_end} when empty
  ExecPolicy exec = ExecPolicy::Parallel;
};

struct Ensemble {
  double time = 0.0;
  double c_n = 0.0;
  std::vector<double> positions;
};

struct SnapshotSeries {
  std::vector<Ensemble> snapshots;
  void write_csv(const std::string& path) const; // t,i,position
};

// rank of particle i is #{j : X_j <= X_i}/n with ties resolved by particle
// index, i.e. 1/n times the 1-based position in the stable sort.
std::vector<double> rank_fractions(std::span<const double> positions);

// positions[i] = quantile(U_i) from the per-particle init substreams;
// Stratified uses the same uniforms sorted ascending (order statistics).
Ensemble init_ensemble(const std::function<double(double)>& quantile_of_m,
                       const SimConfig& config);

// One explicit Euler-Maruyama step of the rank-based interacting system;
// drift and volatility are frozen at the pre-step ranks.
void em_step(const CoefficientModel& model, Ensemble& e, double dt,
             std::span<const double> gaussians,
             ExecPolicy pol = ExecPolicy::Parallel);

// One step of the reordered system: slot k carries the rank-(k+1)/n
// coefficients, then the state is re-sorted.  `sorted` must be ascending.
void reordered_step(const CoefficientModel& model, std::vector<double>& sorted,
                    double c_n, double dt, std::span<const double> gaussians,
                    ExecPolicy pol = ExecPolicy::Parallel);

SnapshotSeries simulate(const CoefficientModel& model,
                        const std::function<double(double)>& quantile_of_m,
                        const SimConfig& config);

// Two reordered systems driven by one shared noise stream; the per-rank
// increments cancel in the pairwise gaps, so sorting makes the mean p-th
// power gap nonincreasing step by step.
struct CoupledState {
  double time = 0.0;
  double c_n = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0; // noise counter
  std::vector<double> yF, yG; // both ascending
};

CoupledState init_coupled(const std::function<double(double)>& quantile_F0,
                          const std::function<double(double)>& quantile_G0,
                          const SimConfig& config);

void coupled_step(const CoefficientModel& model, CoupledState& s, double dt,
                  ExecPolicy pol = ExecPolicy::Parallel);

struct ContractionRow {
  double t = 0.0;
  double p = 0.0;
  double wpp = 0.0;
};

// Runs the coupled pair to t_end recording (1/n) sum |yF_i - yG_i|^p at the
// snapshot times; per_step (optional) sees every step's values in order.
std::vector<ContractionRow> coupled_contraction_run(
    const CoefficientModel& model,
    const std::function<double(double)>& quantile_F0,
    const std::function<double(double)>& quantile_G0, const SimConfig& config,
    std::span<const double> p_list,
    const std::function<void(double, std::span<const double>)>& per_step = {});

} // namespace rankdiff
