#pragma once

// Core state and update math of the stochastic dynamic cache partitioning
// iteration: perturbation sampling, center-point rounding, paired test
// allocations, the zero-sum update vector and the simplex projection.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdcp/rng.hpp"

namespace sdcp {

/// Absolute tolerance used for every feasibility check on real-valued state.
inline constexpr double kFeasibilityTol = 1e-9;

/// Real-valued allocation of `budget` cache slots among providers.
///
/// Invariants (checked on construction): every component is >= 0 and the
/// components sum to `budget` within kFeasibilityTol.
class VirtualAllocation {
 public:
  VirtualAllocation(std::vector<double> values, double budget);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double budget() const { return budget_; }

  friend bool operator==(const VirtualAllocation&, const VirtualAllocation&) = default;

 private:
  std::vector<double> values_;
  double budget_;
};

/// Deployable partition: nonnegative integer slot counts per provider.
class IntegerAllocation {
 public:
  IntegerAllocation() = default;
  explicit IntegerAllocation(std::vector<std::int64_t> slots);

  [[nodiscard]] std::span<const std::int64_t> slots() const { return slots_; }
  [[nodiscard]] std::int64_t operator[](std::size_t i) const { return slots_[i]; }
  [[nodiscard]] std::size_t size() const { return slots_.size(); }
  [[nodiscard]] std::int64_t total() const;
  [[nodiscard]] bool fits(std::int64_t capacity) const { return total() <= capacity; }
  [[nodiscard]] std::vector<double> as_real() const;

  friend bool operator==(const IntegerAllocation&, const IntegerAllocation&) = default;

 private:
  std::vector<std::int64_t> slots_;
};

/// Zero-sum vector with entries in {-1, +1}. Requires an even, positive length.
class PerturbationVector {
 public:
  explicit PerturbationVector(std::vector<int> signs);

  [[nodiscard]] std::span<const int> signs() const { return signs_; }
  [[nodiscard]] int operator[](std::size_t i) const { return signs_[i]; }
  [[nodiscard]] std::size_t size() const { return signs_.size(); }

  friend bool operator==(const PerturbationVector&, const PerturbationVector&) = default;

 private:
  std::vector<int> signs_;
};

/// Stochastic subgradient estimate (misses per second per slot). Sums to zero
/// up to floating-point rounding.
struct UpdateVector {
  std::vector<double> components;

  [[nodiscard]] std::size_t size() const { return components.size(); }
  [[nodiscard]] double sum() const;
  [[nodiscard]] double norm_l1() const;
  [[nodiscard]] double norm_l2() const;
  [[nodiscard]] bool is_zero() const;
};

/// Miss rates (misses/s) measured under the two test allocations of a slot.
struct MeasuredMissPair {
  std::vector<double> y_plus;
  std::vector<double> y_minus;

  [[nodiscard]] std::vector<double> difference() const;
};

struct TestAllocations {
  IntegerAllocation plus;
  IntegerAllocation minus;
};

/// Draws uniformly among the C(P, P/2) zero-sum sign vectors.
/// Throws std::invalid_argument when `providers` is zero or odd.
PerturbationVector sample_perturbation(std::size_t providers, Rng& rng);

/// floor(theta_j) + 1/2 per component; integers map to the cell above them.
std::vector<double> center_point(const VirtualAllocation& theta);

/// The two allocations deployed during one slot, center_point(theta) +- d/2.
/// Both are integral, nonnegative and sum to at most budget + P/2.
TestAllocations make_test_allocations(const VirtualAllocation& theta,
                                      const PerturbationVector& d);

/// dy o d - (1/P) (dy . d) 1
UpdateVector compute_update(std::span<const double> delta_y, const PerturbationVector& d);

/// Euclidean projection of `v` onto {x >= 0, sum(x) = budget}.
///
/// Sort-based: with u sorted descending, the support size is the largest rho
/// such that u_rho - (sum_{i<=rho} u_i - budget)/rho > 0; the result is
/// max(v - tau, 0). Inputs that are already feasible are returned unchanged,
/// which makes the projection idempotent bit-for-bit.
/// Throws std::invalid_argument for a negative budget or empty input.
VirtualAllocation project_simplex(std::span<const double> v, double budget);

/// One projected step: project(theta - step * g). A zero update leaves theta as is.
/// Throws std::invalid_argument if step <= 0 or the sizes disagree.
VirtualAllocation sdcp_step(const VirtualAllocation& theta, const UpdateVector& g, double step);

/// K' = K - P/2, the virtual budget that keeps both test allocations within K.
double virtual_budget(std::int64_t capacity, std::size_t providers);

}  // namespace sdcp
