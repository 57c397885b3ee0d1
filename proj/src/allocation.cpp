#include "sdcp/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sdcp {

VirtualAllocation::VirtualAllocation(std::vector<double> values, double budget)
    : values_(std::move(values)), budget_(budget) {
  if (values_.empty()) throw std::invalid_argument("virtual allocation: empty");
  double sum = 0.0;
  for (double x : values_) {
    if (!(x >= 0.0)) throw std::invalid_argument("virtual allocation: negative component");
    sum += x;
  }
  if (std::abs(sum - budget_) > kFeasibilityTol) {
    throw std::invalid_argument("virtual allocation: components sum to " + std::to_string(sum) +
                                ", expected " + std::to_string(budget_));
  }
}

IntegerAllocation::IntegerAllocation(std::vector<std::int64_t> slots) : slots_(std::move(slots)) {
  for (auto s : slots_) {
    if (s < 0) throw std::invalid_argument("integer allocation: negative component");
  }
}

std::int64_t IntegerAllocation::total() const {
  return std::accumulate(slots_.begin(), slots_.end(), std::int64_t{0});
}

std::vector<double> IntegerAllocation::as_real() const {
  return {slots_.begin(), slots_.end()};
}

PerturbationVector::PerturbationVector(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty() || signs_.size() % 2 != 0) {
    throw std::invalid_argument("perturbation vector: length must be even and positive");
  }
  int sum = 0;
  for (int s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("perturbation vector: entries must be +-1");
    sum += s;
  }
  if (sum != 0) throw std::invalid_argument("perturbation vector: entries must sum to zero");
}

double UpdateVector::sum() const {
  return std::accumulate(components.begin(), components.end(), 0.0);
}

double UpdateVector::norm_l1() const {
  double n = 0.0;
  for (double c : components) n += std::abs(c);
  return n;
}

double UpdateVector::norm_l2() const {
  double n = 0.0;
  for (double c : components) n += c * c;
  return std::sqrt(n);
}

bool UpdateVector::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](double c) { return c == 0.0; });
}

std::vector<double> MeasuredMissPair::difference() const {
  if (y_plus.size() != y_minus.size()) throw std::invalid_argument("miss pair: length mismatch");
  std::vector<double> out(y_plus.size());
  std::transform(y_plus.begin(), y_plus.end(), y_minus.begin(), out.begin(), std::minus<>{});
  return out;
}

PerturbationVector sample_perturbation(std::size_t providers, Rng& rng) {
  if (providers == 0 || providers % 2 != 0) {
    throw std::invalid_argument("sample_perturbation: number of providers must be even and positive, got " +
                                std::to_string(providers));
  }
  std::vector<int> signs(providers, -1);
  std::fill_n(signs.begin(), providers / 2, 1);
  for (std::size_t i = providers - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(signs[i], signs[pick(rng)]);
  }
  return PerturbationVector{std::move(signs)};
}

std::vector<double> center_point(const VirtualAllocation& theta) {
  std::vector<double> out(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) out[j] = std::floor(theta[j]) + 0.5;
  return out;
}

TestAllocations make_test_allocations(const VirtualAllocation& theta, const PerturbationVector& d) {
  if (theta.size() != d.size()) throw std::invalid_argument("make_test_allocations: size mismatch");
  std::vector<std::int64_t> plus(theta.size());
  std::vector<std::int64_t> minus(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    // floor(theta) + 1/2 +- d/2 lands on floor(theta) or floor(theta) + 1.
    const auto base = static_cast<std::int64_t>(std::floor(theta[j]));
    plus[j] = base + (d[j] > 0 ? 1 : 0);
    minus[j] = base + (d[j] > 0 ? 0 : 1);
  }
  return {IntegerAllocation{std::move(plus)}, IntegerAllocation{std::move(minus)}};
}

UpdateVector compute_update(std::span<const double> delta_y, const PerturbationVector& d) {
  if (delta_y.size() != d.size()) throw std::invalid_argument("compute_update: size mismatch");
  const std::size_t p = d.size();
  std::vector<double> g(p);
  double inner = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    g[j] = delta_y[j] * d[j];
    inner += g[j];
  }
  const double shift = inner / static_cast<double>(p);
  for (double& c : g) c -= shift;
  return UpdateVector{std::move(g)};
}

VirtualAllocation project_simplex(std::span<const double> v, double budget) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty vector");
  if (budget < 0.0) throw std::invalid_argument("project_simplex: negative budget");

  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  const bool nonnegative = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
  if (nonnegative && std::abs(sum - budget) <= kFeasibilityTol) {
    return VirtualAllocation{{v.begin(), v.end()}, budget};
  }

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>{});
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t rho = 0; rho < u.size(); ++rho) {
    prefix += u[rho];
    const double candidate = (prefix - budget) / static_cast<double>(rho + 1);
    if (u[rho] - candidate > 0.0) tau = candidate;
  }

  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::max(v[j] - tau, 0.0);

  // Rounding can leave the sum a few ulps off; push the residue onto the
  // largest component, which is strictly positive whenever budget > 0.
  const double residue = budget - std::accumulate(out.begin(), out.end(), 0.0);
  auto largest = std::max_element(out.begin(), out.end());
  *largest = std::max(*largest + residue, 0.0);
  return VirtualAllocation{std::move(out), budget};
}

VirtualAllocation sdcp_step(const VirtualAllocation& theta, const UpdateVector& g, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sdcp_step: step size must be positive");
  if (theta.size() != g.size()) throw std::invalid_argument("sdcp_step: size mismatch");
  if (g.is_zero()) return theta;
  std::vector<double> moved(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) moved[j] = theta[j] - step * g.components[j];
  return project_simplex(moved, theta.budget());
}

double virtual_budget(std::int64_t capacity, std::size_t providers) {
  return static_cast<double>(capacity) - static_cast<double>(providers) / 2.0;
}

}  // namespace sdcp
