#include "rankdiff/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

#include "rankdiff/csv.hpp"
#include "rankdiff/distributions.hpp"
#include "rankdiff/measure.hpp"
#include "rankdiff/model.hpp"
#include "rankdiff/particle.hpp"
#include "rankdiff/pde.hpp"
#include "rankdiff/stationary.hpp"
#include "rankdiff/version.hpp"

namespace rankdiff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now_iso() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

[[noreturn]] void bad_config(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

void expect_keys(const json& j, const char* where,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) bad_config(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

void ensure_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("non-finite value in ") + what);
}

struct InitialSpec {
  std::string kind; // gaussian | uniform | logistic | dirac | stationary
  double mean = 0.0, stddev = 1.0;
  double lo = 0.0, hi = 1.0;
  double scale = 1.0;
  double at = 0.0;
  double shift = 0.0;
};

InitialSpec parse_initial(const json& j, const char* where) {
  if (!j.is_object() || !j.contains("kind"))
    bad_config(std::string(where) + ": need an object with a 'kind'");
  InitialSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (s.kind == "gaussian") {
    expect_keys(j, where, {"kind", "mean", "stddev"});
    s.mean = j.value("mean", 0.0);
    s.stddev = j.value("stddev", 1.0);
    if (!(s.stddev > 0.0)) bad_config(std::string(where) + ": stddev must be > 0");
  } else if (s.kind == "uniform") {
    expect_keys(j, where, {"kind", "lo", "hi"});
    s.lo = j.value("lo", 0.0);
    s.hi = j.value("hi", 1.0);
    if (!(s.hi > s.lo)) bad_config(std::string(where) + ": need hi > lo");
  } else if (s.kind == "logistic") {
    expect_keys(j, where, {"kind", "mean", "scale"});
    s.mean = j.value("mean", 0.0);
    s.scale = j.value("scale", 0.5);
    if (!(s.scale > 0.0)) bad_config(std::string(where) + ": scale must be > 0");
  } else if (s.kind == "dirac") {
    expect_keys(j, where, {"kind", "at"});
    s.at = j.value("at", 0.0);
  } else if (s.kind == "stationary") {
    expect_keys(j, where, {"kind", "shift"});
    s.shift = j.value("shift", 0.0);
  } else {
    bad_config(std::string(where) + ": unknown kind '" + s.kind + "'");
  }
  return s;
}

struct Config {
  json canonical; // effective config used for the hash
  std::string scenario;
  CoefficientModel model;
  SimConfig sim;
  FdParams fd;
  QuantileParams qp;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  std::string out_dir = "out";
  InitialSpec initial;
  InitialSpec initial_g;
  bool has_initial_g = false;
  std::vector<double> p_list;
  double p = 2.0;
  double t1 = 0.0, t2 = 1.0;
  std::vector<std::size_t> n_list;
};

CoefficientModel parse_model(const json& j) {
  if (!j.is_object() || !j.contains("name"))
    bad_config("model: need an object with a 'name'");
  expect_keys(j, "model", {"name", "q", "sigma2"});
  const auto kind = parse_builtin_kind(j.at("name").get<std::string>());
  BuiltinParams params;
  params.q = j.value("q", 2.0);
  params.sigma2 = j.value("sigma2", 1.0);
  return make_builtin(kind, params);
}

SimConfig parse_particles(const json& j) {
  expect_keys(j, "particles",
              {"n", "dt", "t_end", "c_n", "init", "system", "snapshot_times",
               "exec"});
  SimConfig sc;
  sc.n = j.value("n", std::size_t{0});
  sc.dt = j.value("dt", 0.0);
  sc.t_end = j.value("t_end", 0.0);
  if (sc.n < 2) bad_config("particles: n must be >= 2");
  if (!(sc.dt > 0.0)) bad_config("particles: dt must be > 0");
  if (!(sc.t_end >= 0.0)) bad_config("particles: t_end must be >= 0");
  if (j.contains("c_n")) {
    const auto& c = j.at("c_n");
    expect_keys(c, "particles.c_n", {"rule", "c0", "alpha", "value"});
    const auto rule = c.value("rule", std::string("power"));
    if (rule == "power") {
      sc.c_n.kind = CnRule::Kind::Power;
      sc.c_n.c0 = c.value("c0", 1.0);
      sc.c_n.alpha = c.value("alpha", 0.25);
      if (!(sc.c_n.c0 >= 0.0) || !(sc.c_n.alpha > 0.0))
        bad_config("particles.c_n: need c0 >= 0 and alpha > 0");
    } else if (rule == "explicit") {
      sc.c_n.kind = CnRule::Kind::Explicit;
      sc.c_n.value = c.value("value", 0.0);
      if (!(sc.c_n.value >= 0.0)) bad_config("particles.c_n: value must be >= 0");
    } else {
      bad_config("particles.c_n: unknown rule '" + rule + "'");
    }
  }
  const auto init = j.value("init", std::string("iid"));
  if (init == "iid")
    sc.init = InitMode::Iid;
  else if (init == "stratified")
    sc.init = InitMode::Stratified;
  else
    bad_config("particles: unknown init '" + init + "'");
  const auto system = j.value("system", std::string("interacting"));
  if (system == "interacting")
    sc.system = SystemKind::Interacting;
  else if (system == "reordered")
    sc.system = SystemKind::Reordered;
  else
    bad_config("particles: unknown system '" + system + "'");
  const auto exec = j.value("exec", std::string("parallel"));
  if (exec == "serial")
    sc.exec = ExecPolicy::Serial;
  else if (exec == "parallel")
    sc.exec = ExecPolicy::Parallel;
  else
    bad_config("particles: unknown exec '" + exec + "'");
  if (j.contains("snapshot_times")) {
    sc.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    for (std::size_t i = 0; i < sc.snapshot_times.size(); ++i) {
      const double t = sc.snapshot_times[i];
      if (!(t >= 0.0) || t > sc.t_end + 1e-12)
        bad_config("particles: snapshot time outside [0, t_end]");
      if (i > 0 && t < sc.snapshot_times[i - 1])
        bad_config("particles: snapshot_times must be nondecreasing");
    }
  }
  return sc;
}

void parse_pde(const json& j, FdParams& fd, QuantileParams& qp) {
  expect_keys(j, "pde",
              {"x_lo", "x_hi", "nodes", "dt", "scheme", "quantile_count",
               "dt_cap", "safety"});
  fd.x_lo = j.value("x_lo", fd.x_lo);
  fd.x_hi = j.value("x_hi", fd.x_hi);
  fd.nodes = j.value("nodes", fd.nodes);
  fd.dt = j.value("dt", fd.dt);
  const auto scheme = j.value("scheme", std::string("explicit"));
  if (scheme == "explicit")
    fd.scheme = TimeScheme::Explicit;
  else if (scheme == "semi_implicit")
    fd.scheme = TimeScheme::SemiImplicit;
  else
    bad_config("pde: unknown scheme '" + scheme + "'");
  qp.count = j.value("quantile_count", qp.count);
  qp.dt_cap = j.value("dt_cap", qp.dt_cap);
  qp.safety = j.value("safety", qp.safety);
  if (!(qp.dt_cap > 0.0) || !(qp.safety > 0.0) || qp.safety > 1.0)
    bad_config("pde: need dt_cap > 0 and safety in (0,1]");
}

Config parse_config(const json& raw) {
  if (!raw.is_object()) bad_config("top level must be a JSON object");
  expect_keys(raw, "top level",
              {"scenario", "model", "particles", "pde", "seed", "seeds",
               "out_dir", "initial", "initial_g", "p_list", "p", "t1", "t2",
               "n_list"});
  Config c;
  if (!raw.contains("scenario")) bad_config("missing 'scenario'");
  c.scenario = raw.at("scenario").get<std::string>();
  const bool known = c.scenario == "contraction" || c.scenario == "equilibrium" ||
                     c.scenario == "chaos" || c.scenario == "dissipation" ||
                     c.scenario == "stationary_audit";
  if (!known) bad_config("unknown scenario '" + c.scenario + "'");
  if (!raw.contains("model")) bad_config("missing 'model'");
  c.model = parse_model(raw.at("model"));
  const bool needs_particles = c.scenario == "contraction" ||
                               c.scenario == "equilibrium" ||
                               c.scenario == "chaos";
  if (raw.contains("particles"))
    c.sim = parse_particles(raw.at("particles"));
  else if (needs_particles)
    bad_config("scenario '" + c.scenario + "' needs a 'particles' section");
  if (raw.contains("pde")) parse_pde(raw.at("pde"), c.fd, c.qp);
  c.seed = raw.value("seed", std::uint64_t{1});
  c.seeds = raw.value("seeds", std::size_t{1});
  if (c.seeds < 1) bad_config("seeds must be >= 1");
  c.out_dir = raw.value("out_dir", std::string("out"));
  const bool needs_initial = c.scenario != "stationary_audit";
  if (raw.contains("initial"))
    c.initial = parse_initial(raw.at("initial"), "initial");
  else if (needs_initial)
    bad_config("scenario '" + c.scenario + "' needs an 'initial' section");
  if (raw.contains("initial_g")) {
    c.initial_g = parse_initial(raw.at("initial_g"), "initial_g");
    c.has_initial_g = true;
  }
  if (raw.contains("p_list")) {
    c.p_list = raw.at("p_list").get<std::vector<double>>();
    for (double p : c.p_list)
      if (!(p >= 1.0)) bad_config("p_list entries must be >= 1");
  }
  c.p = raw.value("p", 2.0);
  c.t1 = raw.value("t1", 0.0);
  c.t2 = raw.value("t2", 1.0);
  if (raw.contains("n_list")) {
    c.n_list = raw.at("n_list").get<std::vector<std::size_t>>();
    for (std::size_t n : c.n_list)
      if (n < 2) bad_config("n_list entries must be >= 2");
  }
  return c;
}

std::function<double(double)> make_quantile(const InitialSpec& s,
                                            const CoefficientModel& m) {
  if (s.kind == "gaussian") {
    const double mu = s.mean, sd = s.stddev;
    return [mu, sd](double u) { return mu + sd * dist::normal_quantile(u); };
  }
  if (s.kind == "uniform") {
    const double lo = s.lo, hi = s.hi;
    return [lo, hi](double u) { return lo + (hi - lo) * u; };
  }
  if (s.kind == "logistic") {
    const double mu = s.mean, sc = s.scale;
    return [mu, sc](double u) { return dist::logistic_quantile(u, mu, sc); };
  }
  if (s.kind == "dirac") {
    const double at = s.at;
    return [at](double) { return at; };
  }
  // stationary(+shift): quantile = Psi(u) + shift
  auto prof = build_stationary(m);
  const double sh = s.shift;
  return [prof, sh](double u) { return prof->psi(u) + sh; };
}

std::function<double(double)> make_cdf(const InitialSpec& s,
                                       const CoefficientModel& m) {
  if (s.kind == "gaussian") {
    const double mu = s.mean, sd = s.stddev;
    return [mu, sd](double x) { return dist::normal_cdf((x - mu) / sd); };
  }
  if (s.kind == "uniform") {
    const double lo = s.lo, hi = s.hi;
    return [lo, hi](double x) {
      return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    };
  }
  if (s.kind == "logistic") {
    const double mu = s.mean, sc = s.scale;
    return [mu, sc](double x) { return 1.0 / (1.0 + std::exp(-(x - mu) / sc)); };
  }
  if (s.kind == "dirac") {
    const double at = s.at;
    return [at](double x) { return x >= at ? 1.0 : 0.0; };
  }
  auto prof = build_stationary(m);
  const double sh = s.shift;
  return [prof, sh](double x) { return prof->psi_inverse(x - sh); };
}

// quantile table of a grid CDF by monotone linear interpolation
QuantileProfile invert_grid_cdf(const std::vector<double>& x,
                                const std::vector<double>& F) {
  const auto grid = clustered_unit_grid(2048);
  std::vector<double> xq(grid.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i];
    if (u <= F.front()) {
      xq[i] = x.front();
      continue;
    }
    if (u >= F.back()) {
      xq[i] = x.back();
      continue;
    }
    while (j + 2 < x.size() && F[j + 1] < u) ++j;
    const double span = F[j + 1] - F[j];
    const double w = span > 0.0 ? (u - F[j]) / span : 1.0;
    xq[i] = x[j] + w * (x[j + 1] - x[j]);
  }
  return make_profile(grid, std::move(xq), EndpointBehavior::Clamped,
                      EndpointBehavior::Clamped);
}

std::vector<std::string> run_contraction(const Config& c, const fs::path& out) {
  SimConfig sc = c.sim;
  sc.seed = c.seed;
  const auto qF = make_quantile(c.initial, c.model);
  const auto qG =
      make_quantile(c.has_initial_g ? c.initial_g : c.initial, c.model);
  const std::vector<double> ps = c.p_list.empty()
                                     ? std::vector<double>{1.0, 2.0}
                                     : c.p_list;
  const auto rows = coupled_contraction_run(c.model, qF, qG, sc, ps);
  const auto path = (out / "contraction.csv").string();
  csv::Writer w(path, {"t", "p", "wpp"});
  for (const auto& r : rows) {
    ensure_finite(r.wpp, "contraction wpp");
    w.row({csv::fmt(r.t), csv::fmt(r.p), csv::fmt(r.wpp)});
  }
  return {path};
}

std::vector<std::string> run_equilibrium(const Config& c, const fs::path& out) {
  const auto prof = build_stationary(c.model);
  const auto q0 = make_quantile(c.initial, c.model);
  const double xbar = centering_offset(c.model, q0);
  const QuantileProfile finv = prof->quantile_profile(xbar);

  SimConfig sc = c.sim;
  if (sc.snapshot_times.empty()) {
    for (int k = 0; k <= 10; ++k)
      sc.snapshot_times.push_back(sc.t_end * static_cast<double>(k) / 10.0);
  }

  // tabulate F_inf and the stationary density once on the comparison window
  constexpr std::size_t kNodes = 2001;
  const double eps = 1e-4;
  const double x_lo = prof->psi(eps) - xbar;
  const double x_hi = prof->psi(1.0 - eps) - xbar;
  const double dx = (x_hi - x_lo) / static_cast<double>(kNodes - 1);
  std::vector<double> finf_tab(kNodes), dens_tab(kNodes);
  for (std::size_t jn = 0; jn < kNodes; ++jn) {
    const double x = x_lo + static_cast<double>(jn) * dx;
    const double u = prof->psi_inverse(x + xbar, 1e-12);
    finf_tab[jn] = u;
    dens_tab[jn] = 2.0 * c.model.B(u) / c.model.a(u);
  }
  const auto at_node = [&](const std::vector<double>& tab) {
    return [&tab, x_lo, dx](double x) {
      const auto idx = static_cast<std::size_t>(
          std::llround((x - x_lo) / dx));
      return tab[std::min(idx, tab.size() - 1)];
    };
  };

  std::vector<std::string> files;
  std::vector<double> sum_w2(sc.snapshot_times.size(), 0.0);
  std::vector<double> sum_l2(sc.snapshot_times.size(), 0.0);
  for (std::size_t si = 0; si < c.seeds; ++si) {
    sc.seed = c.seed + si;
    const auto series = simulate(c.model, q0, sc);
    const auto path =
        (out / ("equilibrium_seed" + std::to_string(sc.seed) + ".csv"))
            .string();
    csv::Writer w(path, {"t", "w2", "weighted_l2"});
    for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
      const auto& snap = series.snapshots[k];
      std::vector<double> sorted(snap.positions);
      std::sort(sorted.begin(), sorted.end());
      const double w2 =
          std::sqrt(wasserstein_pp_samples_vs_profile(sorted, finv, 2.0));
      const auto empirical = [&sorted](double x) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        return static_cast<double>(it - sorted.begin()) /
               static_cast<double>(sorted.size());
      };
      const double l2 = weighted_l2(empirical, at_node(finf_tab),
                                    at_node(dens_tab), x_lo, x_hi, kNodes);
      ensure_finite(w2, "equilibrium w2");
      ensure_finite(l2, "equilibrium weighted_l2");
      w.row({csv::fmt(snap.time), csv::fmt(w2), csv::fmt(l2)});
      sum_w2[k] += w2;
      sum_l2[k] += l2;
    }
    files.push_back(path);
  }
  const auto agg = (out / "equilibrium.csv").string();
  csv::Writer w(agg, {"t", "w2", "weighted_l2"});
  for (std::size_t k = 0; k < sc.snapshot_times.size(); ++k)
    w.row({csv::fmt(sc.snapshot_times[k]),
           csv::fmt(sum_w2[k] / static_cast<double>(c.seeds)),
           csv::fmt(sum_l2[k] / static_cast<double>(c.seeds))});
  files.push_back(agg);
  return files;
}

std::vector<std::string> run_chaos(const Config& c, const fs::path& out) {
  const std::vector<std::size_t> ns =
      c.n_list.empty() ? std::vector<std::size_t>{100, 1000, 10000} : c.n_list;
  const auto cdf0 = make_cdf(c.initial, c.model);
  const auto q0 = make_quantile(c.initial, c.model);
  const double T = c.sim.t_end;
  const std::vector<double> final_only{T};
  const auto fd = fd_solve(c.model, cdf0, T, c.fd, final_only);
  const auto ref = invert_grid_cdf(fd.x, fd.F.back());

  std::vector<std::vector<double>> w1(ns.size(),
                                      std::vector<double>(c.seeds, 0.0));
  for (std::size_t si = 0; si < c.seeds; ++si) {
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      SimConfig sc = c.sim;
      sc.n = ns[ni];
      sc.seed = c.seed + si;
      sc.snapshot_times = final_only;
      const auto series = simulate(c.model, q0, sc);
      const auto& snap = series.snapshots.back();
      const double v =
          wasserstein_pp_samples_vs_profile(snap.positions, ref, 1.0);
      ensure_finite(v, "chaos w1");
      w1[ni][si] = v;
    }
  }
  std::vector<std::string> files;
  for (std::size_t si = 0; si < c.seeds; ++si) {
    const auto path =
        (out / ("chaos_seed" + std::to_string(c.seed + si) + ".csv")).string();
    csv::Writer w(path, {"n", "w1"});
    for (std::size_t ni = 0; ni < ns.size(); ++ni)
      w.row({csv::fmt(ns[ni]), csv::fmt(w1[ni][si])});
    files.push_back(path);
  }
  const auto agg = (out / "chaos.csv").string();
  csv::Writer w(agg, {"n", "mean_w1"});
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    double s = 0.0;
    for (std::size_t si = 0; si < c.seeds; ++si) s += w1[ni][si];
    w.row({csv::fmt(ns[ni]), csv::fmt(s / static_cast<double>(c.seeds))});
  }
  files.push_back(agg);
  return files;
}

std::vector<std::string> run_dissipation(const Config& c, const fs::path& out) {
  if (!c.has_initial_g)
    bad_config("dissipation needs both 'initial' and 'initial_g'");
  const auto qF = make_quantile(c.initial, c.model);
  const auto qG = make_quantile(c.initial_g, c.model);
  const auto rep =
      dissipation_identity_check(c.model, c.p, qF, qG, c.t1, c.t2, c.qp);
  ensure_finite(rep.lhs, "dissipation lhs");
  ensure_finite(rep.rhs, "dissipation rhs");
  const auto path = (out / "dissipation.csv").string();
  csv::Writer w(path, {"t1", "t2", "lhs", "rhs", "rel_err"});
  w.row({csv::fmt(c.t1), csv::fmt(c.t2), csv::fmt(rep.lhs), csv::fmt(rep.rhs),
         csv::fmt(rep.rel_err)});
  return {path};
}

std::vector<std::string> run_stationary_audit(const Config& c,
                                              const fs::path& out) {
  const auto rep = check_conditions(c.model);
  std::vector<std::string> files;
  const auto cond_path = (out / "conditions.csv").string();
  {
    csv::Writer w(cond_path, {"condition", "verdict", "value"});
    w.row({"d1", to_string(rep.d1), csv::fmt(rep.min_A_increment)});
    w.row({"d2", to_string(rep.d2), csv::fmt(rep.a_interior_min)});
    w.row({"d3", to_string(rep.d3), csv::fmt(rep.a_grid_min)});
    w.row({"r1", rep.r1 ? "holds" : "fails", csv::fmt(rep.r1 ? 1.0 : 0.0)});
    w.row({"r2", rep.r2 ? "holds" : "fails", csv::fmt(rep.r2 ? 1.0 : 0.0)});
    w.row({"e1", to_string(rep.e1), csv::fmt(rep.B_interior_min)});
    w.row({"e2", to_string(rep.e2), csv::fmt(rep.e2_integral)});
    if (rep.e1 == Tri::Holds) {
      const auto hardy = hardy_poincare_check(c.model);
      const char* verdict =
          hardy.verdict == HardyVerdict::Satisfied   ? "satisfied"
          : hardy.verdict == HardyVerdict::Violated ? "violated"
                                                    : "undetermined";
      w.row({"hardy_poincare", verdict,
             csv::fmt(std::max(hardy.sup_left[2], hardy.sup_right[2]))});
    }
  }
  files.push_back(cond_path);
  if (rep.e1 == Tri::Holds) {
    const auto prof = build_stationary(c.model);
    const auto psi_path = (out / "psi.csv").string();
    write_psi_csv(*prof, psi_path);
    files.push_back(psi_path);
    const double x_lo =
        prof->finite_at_zero ? prof->psi_limit_zero : prof->psi_val.front();
    const double x_hi =
        prof->finite_at_one ? prof->psi_limit_one : prof->psi_val.back();
    const auto cdf_path = (out / "stationary_cdf.csv").string();
    write_stationary_cdf_csv(*prof, 0.0, x_lo, x_hi, 512, cdf_path);
    files.push_back(cdf_path);
  }
  return files;
}

} // namespace

ScenarioResult run_scenario(const std::string& config_path,
                            const std::string& out_dir_override,
                            std::optional<std::uint64_t> seed_override) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config: " + config_path);
  json raw = json::parse(in); // throws with line/column info on bad JSON
  Config cfg = parse_config(raw);
  if (seed_override) cfg.seed = *seed_override;
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;

  // hash the effective config: seed resolved, output location excluded
  cfg.canonical = raw;
  cfg.canonical.erase("out_dir");
  cfg.canonical["seed"] = cfg.seed;
  const std::string hash = hex64(fnv1a64(cfg.canonical.dump()));

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.out_dir = out.string();
  if (cfg.scenario == "contraction")
    res.files = run_contraction(cfg, out);
  else if (cfg.scenario == "equilibrium")
    res.files = run_equilibrium(cfg, out);
  else if (cfg.scenario == "chaos")
    res.files = run_chaos(cfg, out);
  else if (cfg.scenario == "dissipation")
    res.files = run_dissipation(cfg, out);
  else
    res.files = run_stationary_audit(cfg, out);

  json manifest;
  manifest["config_hash"] = hash;
  manifest["generated_at"] = utc_now_iso();
  manifest["library_version"] = RANKDIFF_VERSION;
  manifest["scenario"] = cfg.scenario;
  manifest["seed"] = cfg.seed;
  const auto mpath = (out / "manifest.json").string();
  std::ofstream mf(mpath, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + mpath);
  mf << manifest.dump(2) << '\n';
  res.files.push_back(mpath);
  return res;
}

} // namespace rankdiff
