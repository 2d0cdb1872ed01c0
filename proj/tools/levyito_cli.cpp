// levyito: scenario-driven simulation and pricing front end.
//
// Exit codes:
//   0  scenario ran and every reported check passed
//   1  scenario ran but at least one check failed
//   2  configuration error (bad flags, malformed config, unknown keys)
//   3  data error (missing or malformed input files)
//   4  numerical failure while running the scenario

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levyito/errors.hpp"
#include "levyito/scenario.hpp"

namespace {

// Strict unsigned-decimal parse for the LEVYITO_SEED environment variable.
std::uint64_t parse_env_seed(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw levyito::ConfigError(
        "LEVYITO_SEED must be an unsigned decimal integer, got \"" + text +
        "\"");
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw levyito::ConfigError("LEVYITO_SEED is out of range: \"" + text +
                               "\"");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "levyito: Poisson-random-measure simulation, bond pricing, and "
      "multi-currency consistency checks"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::string> out_dir;
  bool quiet = false;
  app.add_option("--config", config_path,
                 "Scenario configuration file (JSON)")
      ->required();
  app.add_option("--seed", seed,
                 "Master seed; overrides mc.seed and LEVYITO_SEED");
  app.add_option("--paths", paths, "Monte Carlo path count; overrides mc.paths")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory; overrides io.out_dir");
  app.add_flag("--quiet", quiet, "Suppress the report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; flag errors are config errors
  }

  try {
    levyito::ScenarioOverrides overrides;
    overrides.seed = seed;
    overrides.paths = paths;
    overrides.out_dir = out_dir;
    if (const char* env = std::getenv("LEVYITO_SEED"))
      overrides.env_seed = parse_env_seed(env);

    const levyito::ScenarioReport report =
        levyito::run_scenario(config_path, overrides);
    if (!quiet) {
      for (const std::string& line : report.lines) std::cout << line << "\n";
      for (const std::string& file : report.output_files)
        std::cout << "wrote " << file << "\n";
    }
    return report.checks_passed ? 0 : 1;
  } catch (const levyito::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const levyito::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const levyito::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
