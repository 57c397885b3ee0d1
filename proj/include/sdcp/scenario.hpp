#pragma once

// Named experiment scenarios behind the command-line runner. Each scenario
// runs its engine jobs, then writes one trace CSV per run, summary.csv and
// manifest.txt into the output directory.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdcp/engine.hpp"

namespace sdcp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

struct RunManifest {
  std::string scenario = "run";  // run | stepsize-compare | slot-sweep | churn
  std::filesystem::path config_path;  // empty = built-in defaults
  std::filesystem::path out_dir = "out";
  std::string run_id;  // filled by run_scenario when empty
};

struct ScenarioFlags {
  std::optional<std::uint64_t> seed;  // already resolved against SDCP_SEED by the caller
  unsigned jobs = 0;                  // 0 = hardware concurrency
  std::vector<double> slot_lengths;   // --T
  std::optional<std::int64_t> cache_slots;  // --K
  std::optional<double> total_rate;         // --lambda
  std::vector<double> reinit_periods;       // --tau, +infinity = never
};

/// UTC timestamp plus seed, e.g. "20261018T120000Z-s1".
std::string make_run_id(std::uint64_t seed);

/// Scenario names accepted by run_scenario.
const std::vector<std::string>& scenario_names();

/// Loads the config, applies flags, runs the scenario and writes its files.
/// Progress and errors go to `log`. Returns one of the exit codes above.
int run_scenario(RunManifest manifest, const ScenarioFlags& flags, std::ostream& log);

}  // namespace sdcp
