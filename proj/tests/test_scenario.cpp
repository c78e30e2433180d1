#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rankdiff/csv.hpp"
#include "rankdiff/scenario.hpp"

using namespace rankdiff;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempTree {
  fs::path root;
  TempTree() {
    root = fs::temp_directory_path() /
           ("rankdiff_scenario_" + std::to_string(::getpid()));
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }
  std::string config(const std::string& name, const json& j) const {
    const auto p = root / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }
  std::string out(const std::string& name) const { return (root / name).string(); }
};

json contraction_config() {
  return json{
      {"scenario", "contraction"},
      {"model", {{"name", "logistic_demo"}, {"sigma2", 1.0}}},
      {"seed", 42},
      {"initial", {{"kind", "gaussian"}, {"mean", 0.0}, {"stddev", 1.0}}},
      {"initial_g", {{"kind", "uniform"}, {"lo", -2.0}, {"hi", 2.0}}},
      {"p_list", {1.0, 2.0}},
      {"particles", {{"n", 200}, {"dt", 1e-3}, {"t_end", 0.05}}}};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("config validation rejects malformed input") {
  TempTree t;
  auto run = [&](const json& j) {
    return run_scenario(t.config("bad.json", j), t.out("bad_out"));
  };
  auto j = contraction_config();
  j["scenario"] = "no_such_scenario";
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["surprise_key"] = 1;
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["model"]["name"] = "no_such_model";
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["particles"].erase("dt");
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j.erase("particles");
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["initial"]["kind"] = "triangular";
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["initial"]["stddev"] = -1.0;
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["particles"]["n"] = 1;
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["p_list"] = {0.5};
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  j = contraction_config();
  j["particles"]["unexpected"] = true;
  CHECK_THROWS_AS((void)run(j), std::invalid_argument);
  // not JSON at all
  const auto garbled = t.root / "garbled.json";
  std::ofstream(garbled) << "{scenario: nope";
  CHECK_THROWS((void)run_scenario(garbled.string(), t.out("g_out")));
  CHECK_THROWS((void)run_scenario(t.out("missing.json"), t.out("m_out")));
}

TEST_CASE("identical initial laws stay glued under the shared noise") {
  TempTree t;
  auto j = contraction_config();
  j.erase("initial_g"); // defaults to the same law as `initial`
  auto res = run_scenario(t.config("same.json", j), t.out("same_out"));
  CHECK(res.scenario == "contraction");
  const auto rows = csv::read_numeric(t.out("same_out") + "/contraction.csv", 3);
  REQUIRE(!rows.empty());
  for (const auto& r : rows) CHECK(r[2] == 0.0);
}

TEST_CASE("contraction output shrinks between the two snapshots") {
  TempTree t;
  auto res = run_scenario(t.config("c.json", contraction_config()), t.out("c_out"));
  const auto rows = csv::read_numeric(t.out("c_out") + "/contraction.csv", 3);
  REQUIRE(rows.size() == 4); // p in {1,2} at t in {0, t_end}
  CHECK(rows[2][2] < rows[0][2]);
  CHECK(rows[3][2] < rows[1][2]);
}

TEST_CASE("stationary audit writes the profile only when one exists") {
  TempTree t;
  json good{{"scenario", "stationary_audit"},
            {"model", {{"name", "logistic_demo"}, {"sigma2", 1.0}}},
            {"seed", 1}};
  auto res = run_scenario(t.config("a.json", good), t.out("a_out"));
  bool has_psi = false, has_cdf = false;
  for (const auto& f : res.files) {
    if (f.find("psi.csv") != std::string::npos) has_psi = true;
    if (f.find("stationary_cdf.csv") != std::string::npos) has_cdf = true;
  }
  CHECK(has_psi);
  CHECK(has_cdf);
  const auto body = slurp(t.out("a_out") + "/conditions.csv");
  CHECK(body.find("e1,holds") != std::string::npos);
  CHECK(body.find("hardy_poincare,satisfied") != std::string::npos);

  json porous{{"scenario", "stationary_audit"},
              {"model", {{"name", "porous_medium"}, {"q", 2.0}}},
              {"seed", 1}};
  auto res2 = run_scenario(t.config("p.json", porous), t.out("p_out"));
  for (const auto& f : res2.files)
    CHECK(f.find("psi.csv") == std::string::npos);
  CHECK_FALSE(fs::exists(t.out("p_out") + "/psi.csv"));
  const auto body2 = slurp(t.out("p_out") + "/conditions.csv");
  CHECK(body2.find("e1,fails") != std::string::npos);
  CHECK(body2.find("hardy_poincare") == std::string::npos);
}

TEST_CASE("same config and seed give byte-identical artifacts") {
  TempTree t;
  const auto cfg = t.config("r.json", contraction_config());
  auto r1 = run_scenario(cfg, t.out("r1"));
  auto r2 = run_scenario(cfg, t.out("r2"));
  REQUIRE(r1.files.size() == r2.files.size());
  for (std::size_t i = 0; i < r1.files.size(); ++i) {
    if (r1.files[i].find("manifest") != std::string::npos)
      continue; // timestamps differ
    CHECK(slurp(r1.files[i]) == slurp(r2.files[i]));
  }
}

TEST_CASE("manifest records the resolved seed and scenario") {
  TempTree t;
  const auto cfg = t.config("m.json", contraction_config());
  (void)run_scenario(cfg, t.out("m1"));
  auto m1 = json::parse(slurp(t.out("m1") + "/manifest.json"));
  CHECK(m1["scenario"] == "contraction");
  CHECK(m1["seed"] == 42);
  CHECK(m1["config_hash"].get<std::string>().size() == 16);

  (void)run_scenario(cfg, t.out("m2"), 99);
  auto m2 = json::parse(slurp(t.out("m2") + "/manifest.json"));
  CHECK(m2["seed"] == 99);
  CHECK(m2["config_hash"] != m1["config_hash"]); // hash covers the seed
  // the seed override changes the simulated noise
  CHECK(slurp(t.out("m1") + "/contraction.csv") !=
        slurp(t.out("m2") + "/contraction.csv"));
}

TEST_CASE("equilibrium scenario fans out per seed and aggregates") {
  TempTree t;
  json j{{"scenario", "equilibrium"},
         {"model", {{"name", "logistic_demo"}, {"sigma2", 1.0}}},
         {"seed", 3},
         {"seeds", 2},
         {"initial", {{"kind", "gaussian"}, {"mean", 0.0}, {"stddev", 1.0}}},
         {"particles",
          {{"n", 200},
           {"dt", 2e-3},
           {"t_end", 0.1},
           {"snapshot_times", {0.0, 0.05, 0.1}}}}};
  auto res = run_scenario(t.config("e.json", j), t.out("e_out"));
  CHECK(fs::exists(t.out("e_out") + "/equilibrium_seed3.csv"));
  CHECK(fs::exists(t.out("e_out") + "/equilibrium_seed4.csv"));
  const auto agg = csv::read_numeric(t.out("e_out") + "/equilibrium.csv", 3);
  REQUIRE(agg.size() == 3);
  const auto s3 = csv::read_numeric(t.out("e_out") + "/equilibrium_seed3.csv", 3);
  const auto s4 = csv::read_numeric(t.out("e_out") + "/equilibrium_seed4.csv", 3);
  for (std::size_t r = 0; r < agg.size(); ++r) {
    CHECK(agg[r][0] == s3[r][0]);
    CHECK(agg[r][1] == doctest::Approx(0.5 * (s3[r][1] + s4[r][1])).epsilon(1e-12));
    CHECK(agg[r][2] == doctest::Approx(0.5 * (s3[r][2] + s4[r][2])).epsilon(1e-12));
  }
}

TEST_CASE("chaos scenario sweeps ensemble sizes against the fd reference") {
  TempTree t;
  json j{{"scenario", "chaos"},
         {"model", {{"name", "logistic_demo"}, {"sigma2", 1.0}}},
         {"seed", 5},
         {"seeds", 2},
         {"initial", {{"kind", "gaussian"}, {"mean", 0.0}, {"stddev", 1.0}}},
         {"n_list", {50, 400}},
         {"particles", {{"n", 50}, {"dt", 2e-3}, {"t_end", 0.1}}},
         {"pde", {{"x_lo", -8.0}, {"x_hi", 8.0}, {"nodes", 401}, {"dt", 5e-4}}}};
  (void)run_scenario(t.config("ch.json", j), t.out("ch_out"));
  const auto agg = csv::read_numeric(t.out("ch_out") + "/chaos.csv", 2);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0][0] == 50.0);
  CHECK(agg[1][0] == 400.0);
  CHECK(agg[1][1] < agg[0][1]); // more particles, smaller W1 error
}

TEST_CASE("dissipation scenario reports one balance row") {
  TempTree t;
  json j{{"scenario", "dissipation"},
         {"model", {{"name", "logistic_demo"}, {"sigma2", 1.0}}},
         {"seed", 1},
         {"p", 2.0},
         {"t1", 0.05},
         {"t2", 0.2},
         {"initial", {{"kind", "gaussian"}, {"mean", 0.0}, {"stddev", 1.5}}},
         {"initial_g", {{"kind", "stationary"}, {"shift", 0.0}}},
         {"pde", {{"quantile_count", 128}, {"dt_cap", 1e-3}}}};
  (void)run_scenario(t.config("d.json", j), t.out("d_out"));
  const auto rows = csv::read_numeric(t.out("d_out") + "/dissipation.csv", 5);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 0.05);
  CHECK(rows[0][1] == 0.2);
  CHECK(rows[0][2] < 0.0);          // the gap shrinks
  CHECK(rows[0][4] < 0.1);          // identity holds within 10% at this budget
}
