#pragma once

// Time-slot simulation loop: per slot, draw a perturbation, deploy the two
// test allocations for half a slot each, measure, build the update vector and
// take the scheduled projected step. Also runs fixed-allocation baselines and
// seeded replications with Student-t confidence intervals.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdcp/allocation.hpp"
#include "sdcp/oracle.hpp"
#include "sdcp/schedule.hpp"
#include "sdcp/workload.hpp"

namespace sdcp {

/// Raised by ExperimentConfig::validate; `field()` names the offending setting.
class InvalidConfig : public std::invalid_argument {
 public:
  InvalidConfig(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::int64_t cache_slots = 1000;  // K
  double slot_length = 10.0;        // T, seconds
  double horizon = 3600.0;          // seconds
  std::vector<double> cp_shares{0.13, 0.75, 0.02, 0.10};
  double total_rate = 100.0;  // requests/s over all providers
  std::size_t catalog_size = 100000;
  double alpha = 0.8;

  ScheduleKind schedule = ScheduleKind::conditional;
  double nu = 0.01;
  double b_ratio = 0.1;
  double bootstrap_time = 360.0;  // seconds, converted to k_bs with slot_length
  double adaptive_time = 3600.0;  // seconds, converted to M with slot_length
  std::optional<double> reinit_period;

  std::optional<OnOffModel> churn;
  std::uint64_t seed = 1;
  int replications = 1;
  std::optional<std::vector<double>> initial_allocation;  // empty = uniform

  [[nodiscard]] std::size_t providers() const { return cp_shares.size(); }
  /// Throws InvalidConfig naming the first field that breaks an invariant.
  void validate() const;
};

/// Provider count actually simulated: odd counts get a zero-rate provider appended.
std::size_t simulated_providers(const ExperimentConfig& cfg);

ScheduleConfig schedule_config(const ExperimentConfig& cfg);

/// Disjoint Zipf sub-catalogs of (nearly) equal size, one per provider, with
/// rate share * total_rate. Includes the zero-rate filler provider for odd P.
std::vector<CpWorkload> build_workloads(const ExperimentConfig& cfg);

/// Greedy optimum over K slots for the stationary workloads of `cfg`.
IntegerAllocation optimal_allocation(const ExperimentConfig& cfg);

struct SlotRecord {
  std::int64_t k = 0;
  double sim_time = 0.0;  // seconds at the end of the slot
  VirtualAllocation theta{{0.0}, 0.0};
  IntegerAllocation theta_plus;
  IntegerAllocation theta_minus;
  std::vector<double> y_plus;
  std::vector<double> y_minus;
  std::vector<double> g_hat;
  double step = 0.0;
  double miss_ratio = 0.0;
  double error = 0.0;
  std::int64_t requests = 0;
  std::int64_t misses = 0;
};

struct TraceSummary {
  double miss_ratio = 0.0;  // pooled misses / requests over the whole run
  double mean_error = 0.0;
  std::vector<double> average_allocation;
  std::int64_t requests = 0;
  std::int64_t misses = 0;
};

struct Trace {
  std::vector<SlotRecord> records;
  TraceSummary summary;
  std::uint64_t seed = 0;

  /// Pooled miss ratio over records whose slot ends in (from, to].
  [[nodiscard]] double miss_ratio_between(double from, double to) const;
};

/// Runs the partitioning algorithm for floor(horizon / T) slots with cfg.seed.
/// Throws InvalidConfig before simulating anything if cfg is invalid.
Trace run_experiment(const ExperimentConfig& cfg);

/// Same measurement loop with `alloc` deployed for both half-slots.
Trace run_baseline(const ExperimentConfig& cfg, const IntegerAllocation& alloc);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;

  [[nodiscard]] double low() const { return mean - half_width; }
  [[nodiscard]] double high() const { return mean + half_width; }
};

/// Student-t interval for the mean; a single sample yields a zero-width interval.
ConfidenceInterval student_t_interval(std::span<const double> samples, double level = 0.95);

struct ReplicationOptions {
  unsigned jobs = 0;  // 0 = hardware concurrency
  bool distinct_seeds = true;  // seed + i per replication; false reuses cfg.seed
};

struct ReplicationSet {
  std::vector<Trace> traces;
  ConfidenceInterval miss_ratio;
  ConfidenceInterval error;
};

/// cfg.replications independent runs (seeds cfg.seed + i), one thread each, up to `jobs` at once.
ReplicationSet run_replications(const ExperimentConfig& cfg, const ReplicationOptions& options = {});

/// As run_replications, but every run deploys `alloc`.
ReplicationSet run_baseline_replications(const ExperimentConfig& cfg, const IntegerAllocation& alloc,
                                         const ReplicationOptions& options = {});

}  // namespace sdcp
