#include "sdcp/workload.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdcp {

Popularity zipf_popularity(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("zipf_popularity: catalog must hold at least one object");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("zipf_popularity: alpha must be >= 0");
  Popularity pop;
  pop.alpha = alpha;
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = std::pow(static_cast<double>(i + 1), -alpha);
  // Summing from the tail adds small terms first.
  std::vector<double> tail_weight(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail_weight[i] = tail_weight[i + 1] + weights[i];
  const double total = tail_weight[0];
  pop.probs.resize(n);
  pop.tail.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) pop.probs[i] = weights[i] / total;
  for (std::size_t i = 0; i <= n; ++i) pop.tail[i] = tail_weight[i] / total;
  return pop;
}

// ---------------------------------------------------------------------------
// ActiveCatalog

namespace {
constexpr double kFixedScale = 4503599627370496.0;  // 2^52
}

std::int64_t ActiveCatalog::to_fixed(double mass) { return std::llround(mass * kFixedScale); }

ActiveCatalog::ActiveCatalog(std::shared_ptr<const Popularity> popularity, const std::vector<bool>& on)
    : popularity_(std::move(popularity)) {
  const std::size_t n = popularity_->n_objects();
  if (on.size() != n) throw std::invalid_argument("active catalog: flag count differs from catalog size");
  on_.assign(n, 0);
  fixed_weight_.resize(n);
  count_tree_.assign(n + 1, 0);
  weight_tree_.assign(n + 1, 0);
  top_bit_ = std::bit_floor(n);
  for (std::size_t i = 0; i < n; ++i) {
    fixed_weight_[i] = to_fixed(popularity_->probs[i]);
    if (on[i]) set(i, true);
  }
}

void ActiveCatalog::add(std::size_t object, std::int64_t count, std::int64_t weight) {
  for (std::size_t i = object + 1; i < count_tree_.size(); i += i & (~i + 1)) {
    count_tree_[i] += count;
    weight_tree_[i] += weight;
  }
}

void ActiveCatalog::set(std::size_t object, bool on) {
  if (is_on(object) == on) return;
  on_[object] = on ? 1 : 0;
  const std::int64_t sign = on ? 1 : -1;
  add(object, sign, sign * fixed_weight_[object]);
  if (on) {
    ++active_count_;
  } else {
    --active_count_;
  }
  active_weight_ += sign * fixed_weight_[object];
}

std::int64_t ActiveCatalog::weight_prefix(std::size_t n) const {
  std::int64_t sum = 0;
  for (std::size_t i = n; i > 0; i -= i & (~i + 1)) sum += weight_tree_[i];
  return sum;
}

double ActiveCatalog::active_mass() const { return static_cast<double>(active_weight_) / kFixedScale; }

double ActiveCatalog::top_mass(std::int64_t slots) const {
  if (slots <= 0) return 0.0;
  if (static_cast<std::size_t>(slots) >= active_count_) return active_mass();
  // Largest prefix holding fewer than `slots` active objects; the next object
  // is the slots-th active one.
  std::size_t pos = 0;
  std::int64_t remaining = slots;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < count_tree_.size() && count_tree_[next] < remaining) {
      pos = next;
      remaining -= count_tree_[next];
    }
  }
  return static_cast<double>(weight_prefix(pos + 1)) / kFixedScale;
}

// ---------------------------------------------------------------------------
// Demand and measurement

CpWorkload::CpWorkload(double rate_, std::shared_ptr<const Popularity> popularity_)
    : rate(rate_), nominal_rate(rate_), popularity(std::move(popularity_)) {
  if (!(rate >= 0.0)) throw std::invalid_argument("workload: rate must be nonnegative");
  if (!popularity) throw std::invalid_argument("workload: missing popularity");
}

double miss_probability(const CpWorkload& w, std::int64_t slots) {
  slots = std::max<std::int64_t>(slots, 0);
  if (w.active) {
    const ActiveCatalog& a = *w.active;
    if (a.active_count() == 0 || static_cast<std::size_t>(slots) >= a.active_count()) return 0.0;
    const double mass = a.active_mass();
    return std::clamp((mass - a.top_mass(slots)) / mass, 0.0, 1.0);
  }
  if (static_cast<std::size_t>(slots) >= w.n_objects()) return 0.0;
  return std::clamp(w.popularity->tail[static_cast<std::size_t>(slots)], 0.0, 1.0);
}

double miss_intensity(const CpWorkload& w, std::int64_t slots) { return w.rate * miss_probability(w, slots); }

std::int64_t WindowSample::total_requests() const {
  return std::accumulate(requests.begin(), requests.end(), std::int64_t{0});
}

std::int64_t WindowSample::total_misses() const {
  return std::accumulate(misses.begin(), misses.end(), std::int64_t{0});
}

std::vector<double> WindowSample::miss_rates(double duration) const {
  std::vector<double> out(misses.size());
  for (std::size_t p = 0; p < misses.size(); ++p) out[p] = static_cast<double>(misses[p]) / duration;
  return out;
}

WindowSample sample_window(const std::vector<CpWorkload>& workloads, const IntegerAllocation& alloc, double duration,
                           Rng& rng) {
  if (!(duration > 0.0)) throw std::invalid_argument("measurement window must be positive");
  if (alloc.size() != workloads.size()) throw std::invalid_argument("allocation size differs from provider count");
  WindowSample s;
  s.requests.resize(workloads.size());
  s.misses.resize(workloads.size());
  for (std::size_t p = 0; p < workloads.size(); ++p) {
    const double mean = workloads[p].rate * duration;
    std::int64_t requests = 0;
    if (mean > 0.0) requests = std::poisson_distribution<std::int64_t>(mean)(rng);
    std::int64_t misses = 0;
    const double q = miss_probability(workloads[p], alloc[p]);
    if (requests > 0 && q > 0.0) misses = std::binomial_distribution<std::int64_t>(requests, q)(rng);
    s.requests[p] = requests;
    s.misses[p] = misses;
  }
  return s;
}

std::vector<double> measure_miss_rates(const std::vector<CpWorkload>& workloads, const IntegerAllocation& alloc,
                                       double duration, Rng& rng) {
  return sample_window(workloads, alloc, duration, rng).miss_rates(duration);
}

// ---------------------------------------------------------------------------
// Churn

void OnOffModel::validate() const {
  if (!(mean_on > 0.0) || !(mean_off > 0.0)) throw std::invalid_argument("on/off model: mean durations must be positive");
  if (!(target_total_rate >= 0.0)) throw std::invalid_argument("on/off model: target rate must be nonnegative");
}

namespace {

double holding_time(const OnOffModel& model, bool on, Rng& rng) {
  return std::exponential_distribution<double>(1.0 / (on ? model.mean_on : model.mean_off))(rng);
}

}  // namespace

void rescale_rates(const OnOffModel& model, std::vector<CpWorkload>& workloads) {
  double offered = 0.0;
  for (const auto& w : workloads) {
    offered += w.nominal_rate * (w.active ? w.active->active_mass() : 1.0);
  }
  for (auto& w : workloads) {
    const double mass = w.active ? w.active->active_mass() : 1.0;
    w.rate = offered > 0.0 ? model.target_total_rate * w.nominal_rate * mass / offered : 0.0;
  }
}

void start_churn(const OnOffModel& model, std::vector<CpWorkload>& workloads, Rng& rng, ChurnStart start) {
  model.validate();
  std::bernoulli_distribution initially_on(model.on_fraction());
  for (auto& w : workloads) {
    const std::size_t n = w.n_objects();
    std::vector<bool> on(n);
    for (std::size_t i = 0; i < n; ++i) on[i] = start == ChurnStart::all_on || initially_on(rng);
    ActiveCatalog catalog(w.popularity, on);
    // Exponential holding times are memoryless, so a fresh draw is the
    // residual lifetime of the current period.
    for (std::size_t i = 0; i < n; ++i) catalog.events.push({holding_time(model, on[i], rng), i});
    w.active = std::move(catalog);
  }
  rescale_rates(model, workloads);
}

std::size_t advance_catalog(const OnOffModel& model, std::vector<CpWorkload>& workloads, double dt, Rng& rng) {
  if (!(dt >= 0.0)) throw std::invalid_argument("advance_catalog: dt must be nonnegative");
  std::size_t flips = 0;
  bool any = false;
  for (auto& w : workloads) {
    if (!w.active) continue;
    any = true;
    ActiveCatalog& a = *w.active;
    const double until = a.clock + dt;
    while (!a.events.empty() && a.events.top().time <= until) {
      const auto event = a.events.top();
      a.events.pop();
      const bool now_on = !a.is_on(event.object);
      a.set(event.object, now_on);
      a.events.push({event.time + holding_time(model, now_on, rng), event.object});
      ++flips;
    }
    a.clock = until;
  }
  if (any) rescale_rates(model, workloads);
  return flips;
}

}  // namespace sdcp
