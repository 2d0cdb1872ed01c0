#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levyito {

// Command-line overrides applied on top of the configuration file. Seed
// precedence, highest first: `seed` (the --seed flag), the config's mc.seed,
// `env_seed` (the LEVYITO_SEED environment variable), then zero.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> env_seed;
};

struct ScenarioReport {
  std::string task;
  bool checks_passed = true;
  std::vector<std::string> output_files;  // CSV reports written
  std::vector<std::string> lines;         // human-readable summary
};

// Loads the JSON scenario at `config_path`, runs its task, writes the CSV
// report(s) into the output directory, and returns the summary. Throws
// ConfigError on malformed configuration (including unknown keys), DataError
// on broken input files, NumericsError on runtime numerical failures.
ScenarioReport run_scenario(const std::string& config_path,
                            const ScenarioOverrides& overrides = {});

}  // namespace levyito
