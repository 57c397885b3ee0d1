#include "sdcp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdcp {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::reciprocal: return "reciprocal";
    case ScheduleKind::moderate: return "moderate";
    case ScheduleKind::conditional: return "conditional";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "reciprocal") return ScheduleKind::reciprocal;
  if (name == "moderate") return ScheduleKind::moderate;
  if (name == "conditional") return ScheduleKind::conditional;
  throw std::invalid_argument("unknown schedule '" + std::string(name) +
                              "' (expected reciprocal, moderate or conditional)");
}

void ScheduleConfig::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("schedule: nu must be positive");
  if (!(b_ratio > 0.0 && b_ratio < 1.0)) throw std::invalid_argument("schedule: b_ratio must lie in (0, 1)");
  if (bootstrap_end < 1) throw std::invalid_argument("schedule: bootstrap phase must last at least one iteration");
  if (bootstrap_end >= adaptive_end) {
    throw std::invalid_argument("schedule: bootstrap end must precede adaptive end");
  }
  if (reinit_period && !(*reinit_period > 0.0)) {
    throw std::invalid_argument("schedule: reinit_period must be positive");
  }
}

ScheduleConfig with_phase_durations(ScheduleConfig cfg, double bootstrap_seconds, double adaptive_seconds,
                                    double slot_length) {
  if (!(slot_length > 0.0)) throw std::invalid_argument("schedule: slot length must be positive");
  const auto bootstrap = static_cast<std::int64_t>(std::floor(bootstrap_seconds / slot_length));
  const auto adaptive = static_cast<std::int64_t>(std::floor(adaptive_seconds / slot_length));
  cfg.bootstrap_end = std::max<std::int64_t>(bootstrap, 1);
  cfg.adaptive_end = std::max(adaptive, cfg.bootstrap_end + 1);
  return cfg;
}

ScheduleState init_from_first_update(const ScheduleConfig& cfg, const UpdateVector& g1, double virtual_budget,
                                     std::size_t providers, double sim_time) {
  const double p = static_cast<double>(providers);
  const double share = virtual_budget / p;
  double a = 1.0;
  if (cfg.kind == ScheduleKind::conditional) {
    const double norm = g1.norm_l1();
    if (norm > 0.0) a = (p / norm) * share;
  } else {
    const double norm = g1.norm_l2();
    if (norm > 0.0) a = share / norm;
  }
  ScheduleState state;
  state.a_current = a;
  state.a_init = a;
  state.b = a * cfg.b_ratio;
  state.k = 1;
  state.init_time = sim_time;
  return state;
}

namespace {

double decay(double previous, double base, double nu) {
  return previous * std::pow(1.0 - 1.0 / base, 0.5 + nu);
}

double conditional_step(const ScheduleState& s, const ScheduleConfig& cfg, double miss_ratio) {
  const std::int64_t k = s.k;
  if (k <= cfg.bootstrap_end) return s.a_init;
  if (k <= cfg.adaptive_end) {
    const double prev = s.a_current;
    // prev - (prev - b) / (M - k + 1), written so that k == M lands on b exactly.
    const auto remaining = static_cast<double>(cfg.adaptive_end - k);
    const double linear = s.b + (prev - s.b) * remaining / (remaining + 1.0);
    const double good = nearest_rank_percentile(s.miss_ratio_history, 5);
    if (miss_ratio <= good) return std::max(std::min(prev / 2.0, linear), s.b);
    return linear;
  }
  return decay(s.a_current, 1.0 + static_cast<double>(k), cfg.nu);
}

}  // namespace

StepResult next_step(ScheduleState state, const ScheduleConfig& cfg, double miss_ratio) {
  if (!(miss_ratio >= 0.0 && miss_ratio <= 1.0)) {
    throw std::invalid_argument("next_step: miss ratio must lie in [0, 1]");
  }
  double a = state.a_current;
  switch (cfg.kind) {
    case ScheduleKind::reciprocal:
      a = state.a_init / static_cast<double>(state.k);
      break;
    case ScheduleKind::moderate:
      a = state.k == 1 ? state.a_init
                       : decay(state.a_current,
                               1.0 + static_cast<double>(cfg.adaptive_end) + static_cast<double>(state.k), cfg.nu);
      break;
    case ScheduleKind::conditional:
      a = conditional_step(state, cfg, miss_ratio);
      break;
  }
  state.a_current = a;
  state.miss_ratio_history.push_back(miss_ratio);
  ++state.k;
  return {a, std::move(state)};
}

ScheduleState maybe_reinitialize(ScheduleState state, const ScheduleConfig& cfg, double sim_time,
                                 const UpdateVector& next_g, double virtual_budget, std::size_t providers) {
  if (!cfg.reinit_period) return state;
  const double period = *cfg.reinit_period;
  if (std::floor(sim_time / period) > std::floor(state.init_time / period)) {
    return init_from_first_update(cfg, next_g, virtual_budget, providers, sim_time);
  }
  return state;
}

double nearest_rank_percentile(std::vector<double> samples, int percent) {
  if (samples.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (percent < 0 || percent > 100) throw std::invalid_argument("percentile must lie in [0, 100]");
  // ceil(percent * n / 100) in integers; 0.05 * 60 is 3.0000000000000004 in doubles.
  const std::size_t n = samples.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = samples.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(samples.begin(), nth, samples.end());
  return *nth;
}

}  // namespace sdcp
