#pragma once

// Step-size sequences for the projected update: Reciprocal (a/k), Moderate
// (slow geometric-like decay) and Conditional (bootstrap / adaptive /
// moderate phases driven by the observed miss ratio), plus periodic
// reinitialization for nonstationary catalogs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdcp/allocation.hpp"

namespace sdcp {

enum class ScheduleKind { reciprocal, moderate, conditional };

std::string_view to_string(ScheduleKind kind);
/// Accepts "reciprocal", "moderate", "conditional". Throws std::invalid_argument otherwise.
ScheduleKind parse_schedule_kind(std::string_view name);

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::conditional;
  double nu = 0.01;                  // exponent offset, decay power is 1/2 + nu
  std::int64_t adaptive_end = 360;   // M, last iteration of the adaptive phase
  std::int64_t bootstrap_end = 36;   // k_bs, last iteration of the bootstrap phase
  double b_ratio = 0.1;              // floor of the adaptive phase relative to a_init
  std::optional<double> reinit_period;  // seconds; empty means never

  /// Throws std::invalid_argument unless 0 < k_bs < M, 0 < b_ratio < 1, nu > 0
  /// and a present reinit_period is positive.
  void validate() const;
};

/// Phase lengths in iterations from wall-clock durations: floor(duration / T),
/// with k_bs >= 1 and M > k_bs enforced.
ScheduleConfig with_phase_durations(ScheduleConfig cfg, double bootstrap_seconds,
                                    double adaptive_seconds, double slot_length);

struct ScheduleState {
  double a_current = 0.0;
  std::int64_t k = 1;  // iteration index since the last (re)initialization
  double a_init = 0.0;
  double b = 0.0;
  std::vector<double> miss_ratio_history;
  double init_time = 0.0;  // simulated time of the last (re)initialization
};

struct StepResult {
  double step;
  ScheduleState state;
};

/// Initial step from the first update vector:
///   Reciprocal / Moderate: a = (K'/P) / ||g1||_2, so the first move has norm K'/P.
///   Conditional:           a = (P / ||g1||_1) * (K'/P).
/// A zero g1 falls back to a = 1.
ScheduleState init_from_first_update(const ScheduleConfig& cfg, const UpdateVector& g1,
                                     double virtual_budget, std::size_t providers,
                                     double sim_time = 0.0);

/// Step size for the current iteration, given that iteration's miss ratio.
/// Appends the miss ratio to the history and advances k.
/// Throws std::invalid_argument when miss_ratio is outside [0, 1].
StepResult next_step(ScheduleState state, const ScheduleConfig& cfg, double miss_ratio);

/// Restarts the sequence from `next_g` when sim_time has entered a new
/// reinit_period window since the last initialization.
ScheduleState maybe_reinitialize(ScheduleState state, const ScheduleConfig& cfg, double sim_time,
                                 const UpdateVector& next_g, double virtual_budget,
                                 std::size_t providers);

/// Nearest-rank percentile: the ceil(percent * n / 100)-th smallest sample
/// (1-based), clamped to the first sample. Throws std::invalid_argument on
/// empty input.
double nearest_rank_percentile(std::vector<double> samples, int percent);

}  // namespace sdcp
