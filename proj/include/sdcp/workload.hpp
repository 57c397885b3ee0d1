#pragma once

// Synthetic content-provider demand: Zipf sub-catalogs, expected miss
// intensity under ideal top-k placement, sampled per-half-slot miss rates and
// ON/OFF object churn.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "sdcp/allocation.hpp"
#include "sdcp/rng.hpp"

namespace sdcp {

/// Object request probabilities of one sub-catalog, most popular first.
struct Popularity {
  std::vector<double> probs;  // non-increasing, sums to 1
  std::vector<double> tail;   // tail[i] = sum of probs[i..n), size n + 1, tail[0] == 1
  double alpha = 0.0;

  [[nodiscard]] std::size_t n_objects() const { return probs.size(); }
};

/// probs[i] proportional to (i + 1)^-alpha. Throws std::invalid_argument for
/// n == 0 or a negative / non-finite alpha.
Popularity zipf_popularity(std::size_t n, double alpha);

/// Which objects of a sub-catalog are currently ON, indexed by popularity
/// rank. Keeps Fenwick trees over counts and fixed-point weights so the
/// "top k active objects" mass is an O(log n) query.
class ActiveCatalog {
 public:
  ActiveCatalog(std::shared_ptr<const Popularity> popularity, const std::vector<bool>& on);

  [[nodiscard]] bool is_on(std::size_t object) const { return on_[object] != 0; }
  void set(std::size_t object, bool on);

  [[nodiscard]] std::size_t active_count() const { return active_count_; }
  /// Popularity mass of all ON objects, in [0, 1].
  [[nodiscard]] double active_mass() const;
  /// Popularity mass of the `slots` most popular ON objects.
  [[nodiscard]] double top_mass(std::int64_t slots) const;

  // Churn clock: absolute time of each object's next state change.
  struct Event {
    double time;
    std::size_t object;
    friend bool operator>(const Event& a, const Event& b) {
      return a.time > b.time || (a.time == b.time && a.object > b.object);
    }
  };
  double clock = 0.0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

 private:
  static std::int64_t to_fixed(double mass);
  void add(std::size_t object, std::int64_t count, std::int64_t weight);
  [[nodiscard]] std::int64_t weight_prefix(std::size_t n) const;

  std::shared_ptr<const Popularity> popularity_;
  std::vector<std::uint8_t> on_;
  std::vector<std::int64_t> fixed_weight_;
  std::vector<std::int64_t> count_tree_;
  std::vector<std::int64_t> weight_tree_;
  std::size_t active_count_ = 0;
  std::int64_t active_weight_ = 0;
  std::size_t top_bit_ = 1;
};

/// Demand of one content provider.
struct CpWorkload {
  double rate = 0.0;          // requests/s currently offered
  double nominal_rate = 0.0;  // requests/s with every object ON, before rescaling
  std::shared_ptr<const Popularity> popularity;
  std::optional<ActiveCatalog> active;  // present in nonstationary mode

  CpWorkload() = default;
  CpWorkload(double rate, std::shared_ptr<const Popularity> popularity);

  [[nodiscard]] std::size_t n_objects() const { return popularity->n_objects(); }
};

/// Probability that a request of this provider misses with `slots` slots
/// holding its most popular (active) objects. 0 once the catalog fits.
double miss_probability(const CpWorkload& w, std::int64_t slots);

/// Expected misses/s: rate * (1 - cached popularity mass). L(0) = rate; slots
/// beyond the catalog size are clamped and yield 0.
double miss_intensity(const CpWorkload& w, std::int64_t slots);

/// Raw counts of one measurement window.
struct WindowSample {
  std::vector<std::int64_t> requests;
  std::vector<std::int64_t> misses;

  [[nodiscard]] std::int64_t total_requests() const;
  [[nodiscard]] std::int64_t total_misses() const;
  /// misses / duration per provider.
  [[nodiscard]] std::vector<double> miss_rates(double duration) const;
};

/// Poisson(rate * duration) requests per provider, binomially thinned by the
/// provider's miss probability under `alloc`.
WindowSample sample_window(const std::vector<CpWorkload>& workloads, const IntegerAllocation& alloc,
                           double duration, Rng& rng);

/// sample_window(...).miss_rates(duration). Throws std::invalid_argument if
/// duration <= 0 or the allocation size differs from the provider count.
std::vector<double> measure_miss_rates(const std::vector<CpWorkload>& workloads, const IntegerAllocation& alloc,
                                       double duration, Rng& rng);

/// Exponential ON/OFF object lifetimes; rates are rescaled so the aggregate
/// offered load stays at target_total_rate.
struct OnOffModel {
  double mean_on = 86400.0;
  double mean_off = 9 * 86400.0;
  double target_total_rate = 100.0;

  /// Throws std::invalid_argument unless both means are positive and the target is >= 0.
  void validate() const;
  [[nodiscard]] double on_fraction() const { return mean_on / (mean_on + mean_off); }
};

enum class ChurnStart {
  stationary,  // each object ON with probability on_fraction()
  all_on,
};

/// Switches every workload to nonstationary mode: draws the initial ON/OFF
/// state and first holding time of each object, then rescales rates.
void start_churn(const OnOffModel& model, std::vector<CpWorkload>& workloads, Rng& rng,
                 ChurnStart start = ChurnStart::stationary);

/// Advances every object's ON/OFF process by dt seconds and rescales rates.
/// Workloads without churn state are left untouched. Returns the number of flips.
std::size_t advance_catalog(const OnOffModel& model, std::vector<CpWorkload>& workloads, double dt, Rng& rng);

/// Sets rate_p = target * nominal_p * active_mass_p / sum_q nominal_q * active_mass_q.
void rescale_rates(const OnOffModel& model, std::vector<CpWorkload>& workloads);

}  // namespace sdcp
