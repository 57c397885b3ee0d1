// sdcp: run cache-partitioning experiments and write CSV traces.
//
//   sdcp --config configs/default.conf --scenario stepsize-compare --out out/
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdcp/config.hpp"
#include "sdcp/scenario.hpp"

namespace {

std::vector<double> durations(const std::vector<std::string>& items, const char* flag) {
  std::vector<double> out;
  for (const auto& item : items) {
    try {
      out.push_back(sdcp::parse_duration(item));
    } catch (const std::invalid_argument& e) {
      throw sdcp::ConfigError(flag, 0, std::string(flag) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic dynamic cache partitioning simulator"};
  sdcp::RunManifest manifest;
  sdcp::ScenarioFlags flags;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> slot_lengths;
  std::vector<std::string> taus;

  app.add_option("--config", config, "key=value experiment file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--scenario", manifest.scenario, "run | stepsize-compare | slot-sweep | churn")
      ->check(CLI::IsMember(sdcp::scenario_names()));
  app.add_option("--out", manifest.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "base seed; overrides SDCP_SEED and the config");
  app.add_option("--jobs", flags.jobs, "parallel replications (0 = logical cores)");
  app.add_option("--T", slot_lengths, "slot length(s), e.g. 1,10,100 or 10s")->delimiter(',');
  app.add_option("--K", flags.cache_slots, "cache size in slots");
  app.add_option("--lambda", flags.total_rate, "total request rate (req/s)");
  app.add_option("--tau", taus, "reinitialization period(s), e.g. 3h,1d,inf")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sdcp::kExitOk : sdcp::kExitConfigError;
  }

  try {
    flags.slot_lengths = durations(slot_lengths, "--T");
    flags.reinit_periods = durations(taus, "--tau");
  } catch (const sdcp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sdcp::kExitConfigError;
  }
  flags.seed = seed;
  if (!flags.seed) {
    if (const char* env = std::getenv("SDCP_SEED"); env != nullptr && *env != '\0') {
      const std::string text(env);
      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        std::cerr << "config error: SDCP_SEED: expected an unsigned integer, got '" << text << "'\n";
        return sdcp::kExitConfigError;
      }
      flags.seed = value;
    }
  }
  manifest.config_path = config;
  return sdcp::run_scenario(manifest, flags, std::cerr);
}
