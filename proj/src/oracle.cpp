#include "sdcp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdcp {

double MissCurveSet::at(std::size_t p, std::int64_t slots) const {
  const auto& c = curves[p];
  const auto idx = std::clamp<std::int64_t>(slots, 0, static_cast<std::int64_t>(c.size()) - 1);
  return c[static_cast<std::size_t>(idx)];
}

double MissCurveSet::total(const IntegerAllocation& theta) const {
  if (theta.size() != providers()) throw std::invalid_argument("curve set: allocation size mismatch");
  double sum = 0.0;
  for (std::size_t p = 0; p < providers(); ++p) sum += at(p, theta[p]);
  return sum;
}

MissCurveSet tabulate_curves(const std::vector<CpWorkload>& workloads, std::int64_t capacity) {
  if (capacity < 0) throw std::invalid_argument("tabulate_curves: negative capacity");
  MissCurveSet set;
  set.capacity = capacity;
  set.curves.reserve(workloads.size());
  for (const auto& w : workloads) {
    std::vector<double> curve(static_cast<std::size_t>(capacity) + 1);
    for (std::int64_t s = 0; s <= capacity; ++s) curve[static_cast<std::size_t>(s)] = miss_intensity(w, s);
    set.curves.push_back(std::move(curve));
  }
  return set;
}

IntegerAllocation greedy_optimal(const MissCurveSet& curves, std::int64_t budget) {
  if (budget < 0 || budget > curves.capacity) throw std::invalid_argument("greedy_optimal: budget outside [0, K]");
  const std::size_t n = curves.providers();
  std::vector<std::int64_t> theta(n, 0);
  if (n == 0) return IntegerAllocation{theta};
  for (std::int64_t slot = 0; slot < budget; ++slot) {
    std::size_t best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p) {
      const double gain = curves.at(p, theta[p]) - curves.at(p, theta[p] + 1);
      if (gain > best_gain) {
        best_gain = gain;
        best = p;
      }
    }
    ++theta[best];
  }
  return IntegerAllocation{std::move(theta)};
}

namespace {

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  k = std::min(k, n - k);
  // Partial products are C(n - k + i, i), integral at every step.
  long double c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(std::llround(c));
}

void enumerate(const MissCurveSet& curves, std::size_t p, std::int64_t remaining, std::vector<std::int64_t>& current,
               double partial, double& best_value, std::vector<std::int64_t>& best) {
  if (p == curves.providers()) {
    // Lexicographic order of visits means the first minimizer found is the smallest.
    if (partial < best_value) {
      best_value = partial;
      best = current;
    }
    return;
  }
  for (std::int64_t s = 0; s <= remaining; ++s) {
    current[p] = s;
    enumerate(curves, p + 1, remaining - s, current, partial + curves.at(p, s), best_value, best);
  }
  current[p] = 0;
}

}  // namespace

IntegerAllocation brute_force_optimal(const MissCurveSet& curves, std::int64_t budget) {
  if (budget < 0 || budget > curves.capacity) throw std::invalid_argument("brute_force_optimal: budget outside [0, K]");
  const std::size_t n = curves.providers();
  if (n == 0) return IntegerAllocation{};
  const auto count = binomial_capped(static_cast<std::uint64_t>(budget) + n - 1, n - 1, kBruteForceLimit);
  if (count > kBruteForceLimit) throw std::length_error("brute_force_optimal: instance too large to enumerate");
  std::vector<std::int64_t> current(n, 0);
  std::vector<std::int64_t> best(n, 0);
  double best_value = std::numeric_limits<double>::infinity();
  enumerate(curves, 0, budget, current, 0.0, best_value, best);
  return IntegerAllocation{std::move(best)};
}

std::vector<double> interpolant_minimizer(const MissCurveSet& curves, double budget, double grid) {
  if (!(grid > 0.0) || grid > 1.0) throw std::invalid_argument("interpolant_minimizer: grid must lie in (0, 1]");
  const double per_slot = 1.0 / grid;
  const auto increments_per_slot = static_cast<std::int64_t>(std::llround(per_slot));
  if (std::abs(per_slot - static_cast<double>(increments_per_slot)) > 1e-9) {
    throw std::invalid_argument("interpolant_minimizer: grid must divide 1");
  }
  if (!(budget >= 0.0)) throw std::invalid_argument("interpolant_minimizer: negative budget");
  const std::size_t n = curves.providers();
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;

  // Positions are tracked in integer grid units so cell boundaries are exact.
  std::vector<std::int64_t> units(n, 0);
  const auto slope = [&](std::size_t p) {
    const std::int64_t cell = units[p] / increments_per_slot;
    return curves.at(p, cell + 1) - curves.at(p, cell);
  };
  const auto total_units = static_cast<std::int64_t>(std::floor(budget / grid + 1e-9));
  for (std::int64_t step = 0; step < total_units; ++step) {
    std::size_t best = 0;
    double best_slope = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p) {
      const double s = slope(p);
      if (s < best_slope) {
        best_slope = s;
        best = p;
      }
    }
    ++units[best];
  }
  for (std::size_t p = 0; p < n; ++p) x[p] = static_cast<double>(units[p]) * grid;
  // Whatever does not fill a whole grid unit goes to the cheapest next cell.
  const double leftover = budget - static_cast<double>(total_units) * grid;
  if (leftover > 0.0) {
    std::size_t best = 0;
    for (std::size_t p = 1; p < n; ++p) {
      if (slope(p) < slope(best)) best = p;
    }
    x[best] += leftover;
  }
  return x;
}

double error_metric(std::span<const double> theta, const IntegerAllocation& opt, std::int64_t capacity) {
  if (theta.size() != opt.size()) throw std::invalid_argument("error_metric: size mismatch");
  if (capacity <= 0) throw std::invalid_argument("error_metric: capacity must be positive");
  double worst = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    worst = std::max(worst, std::abs(theta[j] - static_cast<double>(opt[j])));
  }
  return worst / static_cast<double>(capacity);
}

IntegerAllocation uniform_allocation(std::size_t providers, std::int64_t capacity) {
  if (providers == 0) throw std::invalid_argument("uniform_allocation: need at least one provider");
  if (capacity < 0) throw std::invalid_argument("uniform_allocation: negative capacity");
  const auto p = static_cast<std::int64_t>(providers);
  std::vector<std::int64_t> slots(providers, capacity / p);
  const std::int64_t remainder = capacity % p;
  for (std::int64_t i = 0; i < remainder; ++i) ++slots[static_cast<std::size_t>(i)];
  return IntegerAllocation{std::move(slots)};
}

}  // namespace sdcp
