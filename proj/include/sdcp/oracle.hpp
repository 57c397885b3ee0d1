#pragma once

// Exact baselines for separable convex slot allocation: greedy marginal
// allocation, exhaustive enumeration for tiny instances, the minimizer of the
// piecewise-linear interpolant, the uniform split and the error metric.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdcp/allocation.hpp"
#include "sdcp/workload.hpp"

namespace sdcp {

/// Tabulated miss intensities L_p(0..capacity) per provider (misses/s).
struct MissCurveSet {
  std::vector<std::vector<double>> curves;
  std::int64_t capacity = 0;

  [[nodiscard]] std::size_t providers() const { return curves.size(); }
  /// L_p(slots), with slots clamped to [0, capacity].
  [[nodiscard]] double at(std::size_t p, std::int64_t slots) const;
  /// L(theta) = sum_p L_p(theta_p).
  [[nodiscard]] double total(const IntegerAllocation& theta) const;
};

/// Tabulates miss_intensity for every provider up to `capacity` slots.
MissCurveSet tabulate_curves(const std::vector<CpWorkload>& workloads, std::int64_t capacity);

/// Adds slots one at a time to the provider whose miss intensity drops the
/// most; ties go to the lowest index, so with every gain at zero the slot goes
/// to provider 0. Throws std::invalid_argument if budget is outside [0, capacity].
IntegerAllocation greedy_optimal(const MissCurveSet& curves, std::int64_t budget);

/// Maximum number of allocations brute_force_optimal is willing to score.
inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

/// Exhaustive minimizer of L over {theta >= 0 integral, sum theta <= budget};
/// the lexicographically smallest minimizer wins ties. Throws
/// std::length_error when C(budget + P - 1, P - 1) exceeds kBruteForceLimit.
IntegerAllocation brute_force_optimal(const MissCurveSet& curves, std::int64_t budget);

/// Minimizer of the piecewise-linear interpolant of the curves over
/// {x >= 0, sum x = budget}, built greedily in increments of `grid` slots.
/// `grid` must divide 1 (1, 1/2, 1/64, ...). Throws std::invalid_argument otherwise.
std::vector<double> interpolant_minimizer(const MissCurveSet& curves, double budget, double grid);

/// max_j |theta_j - opt_j| / capacity
double error_metric(std::span<const double> theta, const IntegerAllocation& opt, std::int64_t capacity);

/// floor(K/P) each, with the remainder going one slot apiece to the first providers.
IntegerAllocation uniform_allocation(std::size_t providers, std::int64_t capacity);

}  // namespace sdcp
