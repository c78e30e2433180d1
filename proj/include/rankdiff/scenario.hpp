#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rankdiff {

struct ScenarioResult {
  std::string scenario;
  std::string out_dir;
  std::vector<std::string> files; // artifacts written, manifest last
};

// Loads a JSON scenario config, runs it, and writes the CSV artifacts plus a
// manifest recording the config hash, seed, and library version.  Any parse,
// validation, or runtime failure throws; the CLI maps a throw to a nonzero
// exit so no partial run looks like a success.
ScenarioResult run_scenario(const std::string& config_path,
                            const std::string& out_dir_override = "",
                            std::optional<std::uint64_t> seed_override = {});

} // namespace rankdiff
