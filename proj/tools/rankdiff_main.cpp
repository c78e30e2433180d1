#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rankdiff/scenario.hpp"
#include "rankdiff/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rank-based particle / quasilinear PDE scenario runner"};
  app.set_version_flag("--version", RANKDIFF_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
  run->add_option("config", config_path, "path to the config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory override");
  auto* seed_opt = run->add_option("--seed", seed, "seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<std::uint64_t> seed_override;
    if (seed_opt->count() > 0) seed_override = seed;
    const auto res = rankdiff::run_scenario(config_path, out_dir, seed_override);
    for (const auto& f : res.files) std::cout << f << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
