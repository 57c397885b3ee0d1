#include "sdcp/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "sdcp/config.hpp"
#include "sdcp/oracle.hpp"
#include "sdcp/report.hpp"

namespace sdcp {

namespace {

constexpr double kDay = 86400.0;

struct Job {
  std::string run;       // label in summary.csv and file names
  std::string schedule;  // schedule name or "fixed"
  ExperimentConfig cfg;
  std::optional<IntegerAllocation> fixed;
  double measured_from = 0.0;  // summary pools slots ending after this time
};

std::string duration_label(double seconds) {
  if (!std::isfinite(seconds)) return "inf";
  for (const auto& [unit, size] : {std::pair{'d', kDay}, {'h', 3600.0}, {'m', 60.0}}) {
    if (seconds >= size && std::fmod(seconds, size) == 0.0) return format_number(seconds / size) + unit;
  }
  return format_number(seconds) + "s";
}

IntegerAllocation uniform_baseline(const ExperimentConfig& cfg) {
  const IntegerAllocation real = uniform_allocation(cfg.providers(), cfg.cache_slots);
  std::vector<std::int64_t> slots(real.slots().begin(), real.slots().end());
  slots.resize(simulated_providers(cfg), 0);
  return IntegerAllocation{std::move(slots)};
}

void add_baselines(std::vector<Job>& jobs, const ExperimentConfig& cfg) {
  jobs.push_back({"opt", "fixed", cfg, optimal_allocation(cfg), 0.0});
  jobs.push_back({"unif", "fixed", cfg, uniform_baseline(cfg), 0.0});
}

void require_single(const std::vector<double>& values, const char* flag, const std::string& scenario) {
  if (values.size() > 1) {
    throw ConfigError(flag, 0, std::string(flag) + ": scenario '" + scenario + "' takes a single value");
  }
}

std::vector<Job> plan(const RunManifest& manifest, const ScenarioFlags& flags, ExperimentConfig cfg) {
  const std::string& name = manifest.scenario;
  if (name != "slot-sweep") require_single(flags.slot_lengths, "--T", name);
  if (name != "churn") require_single(flags.reinit_periods, "--tau", name);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.cache_slots) cfg.cache_slots = *flags.cache_slots;
  if (flags.total_rate) cfg.total_rate = *flags.total_rate;
  if (name != "slot-sweep" && !flags.slot_lengths.empty()) cfg.slot_length = flags.slot_lengths.front();
  if (name != "churn" && !flags.reinit_periods.empty()) {
    const double tau = flags.reinit_periods.front();
    cfg.reinit_period = std::isfinite(tau) ? std::optional<double>(tau) : std::nullopt;
  }
  cfg.validate();

  std::vector<Job> jobs;
  if (name == "run") {
    jobs.push_back({"sdcp", std::string(to_string(cfg.schedule)), cfg, std::nullopt, 0.0});
    add_baselines(jobs, cfg);
  } else if (name == "stepsize-compare") {
    for (auto kind : {ScheduleKind::reciprocal, ScheduleKind::moderate, ScheduleKind::conditional}) {
      ExperimentConfig c = cfg;
      c.schedule = kind;
      jobs.push_back({std::string(to_string(kind)), std::string(to_string(kind)), c, std::nullopt, 0.0});
    }
    add_baselines(jobs, cfg);
  } else if (name == "slot-sweep") {
    const std::vector<double> lengths = flags.slot_lengths.empty() ? std::vector<double>{1.0, 10.0, 100.0}
                                                                   : flags.slot_lengths;
    for (double t : lengths) {
      ExperimentConfig c = cfg;
      c.slot_length = t;
      c.validate();
      jobs.push_back({"T=" + duration_label(t), std::string(to_string(c.schedule)), c, std::nullopt, 0.0});
    }
  } else if (name == "churn") {
    if (!cfg.churn) cfg.churn = OnOffModel{};
    const std::vector<double> taus = flags.reinit_periods.empty()
                                         ? std::vector<double>{3 * 3600.0, kDay, HUGE_VAL}
                                         : flags.reinit_periods;
    const double from = std::max(0.0, cfg.horizon - kDay);
    for (double tau : taus) {
      ExperimentConfig c = cfg;
      c.schedule = ScheduleKind::conditional;
      c.reinit_period = std::isfinite(tau) ? std::optional<double>(tau) : std::nullopt;
      c.validate();
      jobs.push_back({"tau=" + duration_label(tau), "conditional", c, std::nullopt, from});
    }
  } else {
    throw ConfigError("--scenario", 0, "--scenario: unknown scenario '" + name + "'");
  }
  return jobs;
}

std::string file_stem(const std::string& run) {
  std::string out;
  for (char c : run) {
    if (c != '=') out += c;
  }
  return out;
}

}  // namespace

std::string make_run_id(std::uint64_t seed) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
  return std::string(buf) + "-s" + std::to_string(seed);
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"run", "stepsize-compare", "slot-sweep", "churn"};
  return names;
}

int run_scenario(RunManifest manifest, const ScenarioFlags& flags, std::ostream& log) {
  std::vector<Job> jobs;
  ExperimentConfig base;
  try {
    base = manifest.config_path.empty() ? ExperimentConfig{} : parse_config(manifest.config_path);
    jobs = plan(manifest, flags, base);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  const std::uint64_t seed = jobs.front().cfg.seed;
  if (manifest.run_id.empty()) manifest.run_id = make_run_id(seed);

  try {
    std::filesystem::create_directories(manifest.out_dir);
    const ReplicationOptions options{flags.jobs, true};
    std::vector<SummaryRow> rows;
    std::vector<std::string> files;
    for (const Job& job : jobs) {
      log << manifest.scenario << ": " << job.run << " (" << job.cfg.replications << " replication"
          << (job.cfg.replications == 1 ? "" : "s") << ")\n";
      ReplicationSet set = job.fixed ? run_baseline_replications(job.cfg, *job.fixed, options)
                                     : run_replications(job.cfg, options);
      std::vector<double> ratios;
      for (const Trace& t : set.traces) {
        ratios.push_back(job.measured_from > 0.0 ? t.miss_ratio_between(job.measured_from, job.cfg.horizon)
                                                 : t.summary.miss_ratio);
        const std::string file = file_stem(job.run) + "_seed" + std::to_string(t.seed) + ".csv";
        emit_trace_csv(t, manifest.out_dir / file);
        files.push_back(file);
      }
      rows.push_back({manifest.scenario, job.run, job.schedule, student_t_interval(ratios), set.error.mean,
                      job.cfg.replications, job.measured_from});
    }
    emit_summary_csv(rows, manifest.out_dir / "summary.csv");

    std::ofstream m(manifest.out_dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    m << "run_id=" << manifest.run_id << '\n'
      << "scenario=" << manifest.scenario << '\n'
      << "config=" << (manifest.config_path.empty() ? "<defaults>" : manifest.config_path.string()) << '\n'
      << "seed=" << seed << '\n';
    for (const auto& f : files) m << "trace=" << f << '\n';
    m << "summary=summary.csv\n";
    if (!m.flush()) throw std::runtime_error("manifest.txt: write failed");
    log << "wrote " << files.size() << " traces and summary.csv to " << manifest.out_dir.string() << '\n';
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace sdcp
