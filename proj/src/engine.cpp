#include "sdcp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace sdcp {

void ExperimentConfig::validate() const {
  if (cp_shares.empty()) throw InvalidConfig("cp_shares", "at least one provider is required");
  double share_sum = 0.0;
  for (double s : cp_shares) {
    if (!(s >= 0.0)) throw InvalidConfig("cp_shares", "shares must be nonnegative");
    share_sum += s;
  }
  if (std::abs(share_sum - 1.0) > 1e-9) {
    throw InvalidConfig("cp_shares", "shares sum to " + std::to_string(share_sum) + ", expected 1");
  }
  if (cache_slots < 0) throw InvalidConfig("K", "cache size must be nonnegative");
  const auto p = static_cast<std::int64_t>(simulated_providers(*this));
  if (2 * cache_slots < p) throw InvalidConfig("K", "cache must hold at least half a slot per provider (K >= P/2)");
  if (!(slot_length > 0.0)) throw InvalidConfig("T", "slot length must be positive");
  if (!(horizon >= slot_length)) throw InvalidConfig("horizon", "horizon must cover at least one slot");
  if (!(total_rate >= 0.0)) throw InvalidConfig("total_rate", "request rate must be nonnegative");
  if (catalog_size < providers()) throw InvalidConfig("catalog_size", "every provider needs at least one object");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha", "Zipf exponent must be >= 0");
  if (!(bootstrap_time > 0.0)) throw InvalidConfig("bootstrap", "bootstrap duration must be positive");
  if (!(adaptive_time > bootstrap_time)) throw InvalidConfig("adaptive", "adaptive phase must end after bootstrap");
  try {
    schedule_config(*this).validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidConfig("schedule", e.what());
  }
  if (churn) {
    if (!(churn->mean_on > 0.0)) throw InvalidConfig("mean_on", "mean ON duration must be positive");
    if (!(churn->mean_off > 0.0)) throw InvalidConfig("mean_off", "mean OFF duration must be positive");
  }
  if (replications < 1) throw InvalidConfig("replications", "at least one replication is required");
  if (initial_allocation) {
    if (initial_allocation->size() != providers()) {
      throw InvalidConfig("initial_allocation", "needs one entry per provider");
    }
    for (double x : *initial_allocation) {
      if (!(x >= 0.0)) throw InvalidConfig("initial_allocation", "entries must be nonnegative");
    }
  }
}

std::size_t simulated_providers(const ExperimentConfig& cfg) {
  const std::size_t p = cfg.providers();
  return p % 2 == 0 ? p : p + 1;
}

ScheduleConfig schedule_config(const ExperimentConfig& cfg) {
  ScheduleConfig s;
  s.kind = cfg.schedule;
  s.nu = cfg.nu;
  s.b_ratio = cfg.b_ratio;
  s.reinit_period = cfg.reinit_period;
  return with_phase_durations(s, cfg.bootstrap_time, cfg.adaptive_time, cfg.slot_length);
}

std::vector<CpWorkload> build_workloads(const ExperimentConfig& cfg) {
  const std::size_t p = cfg.providers();
  const std::size_t base = cfg.catalog_size / p;
  const std::size_t extra = cfg.catalog_size % p;
  std::vector<CpWorkload> out;
  out.reserve(simulated_providers(cfg));
  std::shared_ptr<const Popularity> shared;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t n = base + (i < extra ? 1 : 0);
    if (!shared || shared->n_objects() != n) shared = std::make_shared<const Popularity>(zipf_popularity(n, cfg.alpha));
    out.emplace_back(cfg.cp_shares[i] * cfg.total_rate, shared);
  }
  if (p % 2 != 0) out.emplace_back(0.0, std::make_shared<const Popularity>(zipf_popularity(1, cfg.alpha)));
  return out;
}

IntegerAllocation optimal_allocation(const ExperimentConfig& cfg) {
  return greedy_optimal(tabulate_curves(build_workloads(cfg), cfg.cache_slots), cfg.cache_slots);
}

double Trace::miss_ratio_between(double from, double to) const {
  std::int64_t requests = 0;
  std::int64_t misses = 0;
  for (const auto& r : records) {
    if (r.sim_time > from && r.sim_time <= to) {
      requests += r.requests;
      misses += r.misses;
    }
  }
  return requests > 0 ? static_cast<double>(misses) / static_cast<double>(requests) : 0.0;
}

namespace {

IntegerAllocation current_optimum(const std::vector<CpWorkload>& workloads, std::int64_t capacity) {
  return greedy_optimal(tabulate_curves(workloads, capacity), capacity);
}

VirtualAllocation initial_state(const ExperimentConfig& cfg, std::size_t providers, double budget) {
  std::vector<double> start(providers, budget / static_cast<double>(providers));
  if (cfg.initial_allocation) {
    start.assign(providers, 0.0);
    std::copy(cfg.initial_allocation->begin(), cfg.initial_allocation->end(), start.begin());
  }
  return project_simplex(start, budget);
}

void summarize(Trace& trace) {
  TraceSummary& s = trace.summary;
  if (trace.records.empty()) return;
  const std::size_t p = trace.records.front().theta.size();
  s.average_allocation.assign(p, 0.0);
  double error_sum = 0.0;
  for (const auto& r : trace.records) {
    s.requests += r.requests;
    s.misses += r.misses;
    error_sum += r.error;
    for (std::size_t j = 0; j < p; ++j) s.average_allocation[j] += r.theta[j];
  }
  const auto n = static_cast<double>(trace.records.size());
  for (double& x : s.average_allocation) x /= n;
  s.mean_error = error_sum / n;
  s.miss_ratio = s.requests > 0 ? static_cast<double>(s.misses) / static_cast<double>(s.requests) : 0.0;
}

void require(bool condition, const char* what) {
  if (!condition) throw std::logic_error(std::string("consistency check failed: ") + what);
}

// Churn rescales provider rates so their total stays at the configured rate.
std::optional<OnOffModel> churn_model(const ExperimentConfig& cfg) {
  if (!cfg.churn) return std::nullopt;
  OnOffModel model = *cfg.churn;
  model.target_total_rate = cfg.total_rate;
  return model;
}

std::int64_t slot_count(const ExperimentConfig& cfg) {
  return static_cast<std::int64_t>(std::floor(cfg.horizon / cfg.slot_length + 1e-9));
}

}  // namespace

Trace run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed);
  const std::size_t p = simulated_providers(cfg);
  const std::int64_t capacity = cfg.cache_slots;
  const double budget = virtual_budget(capacity, p);
  const double half = cfg.slot_length / 2.0;
  const ScheduleConfig sched = schedule_config(cfg);

  std::vector<CpWorkload> workloads = build_workloads(cfg);
  const std::optional<OnOffModel> churn = churn_model(cfg);
  if (churn) start_churn(*churn, workloads, rng);
  IntegerAllocation optimum = current_optimum(workloads, capacity);

  VirtualAllocation theta = initial_state(cfg, p, budget);
  std::optional<ScheduleState> state;

  Trace trace;
  trace.seed = cfg.seed;
  const std::int64_t slots = slot_count(cfg);
  trace.records.reserve(static_cast<std::size_t>(slots));
  for (std::int64_t k = 1; k <= slots; ++k) {
    const PerturbationVector d = sample_perturbation(p, rng);
    TestAllocations tests = make_test_allocations(theta, d);
    require(tests.plus.fits(capacity) && tests.minus.fits(capacity), "test allocations exceed the cache");

    const WindowSample plus = sample_window(workloads, tests.plus, half, rng);
    const WindowSample minus = sample_window(workloads, tests.minus, half, rng);
    MeasuredMissPair measured{plus.miss_rates(half), minus.miss_rates(half)};
    const UpdateVector g = compute_update(measured.difference(), d);
    require(std::abs(g.sum()) <= kFeasibilityTol * std::max(1.0, g.norm_l1()), "update vector is not zero-sum");

    SlotRecord rec;
    rec.k = k;
    rec.sim_time = static_cast<double>(k) * cfg.slot_length;
    rec.requests = plus.total_requests() + minus.total_requests();
    rec.misses = plus.total_misses() + minus.total_misses();
    rec.miss_ratio =
        rec.requests > 0 ? static_cast<double>(rec.misses) / static_cast<double>(rec.requests) : 0.0;

    // A restart takes its initial step from the first update of the new window.
    const double slot_start = static_cast<double>(k - 1) * cfg.slot_length;
    state = state ? maybe_reinitialize(std::move(*state), sched, slot_start, g, budget, p)
                  : init_from_first_update(sched, g, budget, p, 0.0);
    StepResult step = next_step(std::move(*state), sched, rec.miss_ratio);

    rec.theta = theta;
    rec.theta_plus = std::move(tests.plus);
    rec.theta_minus = std::move(tests.minus);
    rec.y_plus = std::move(measured.y_plus);
    rec.y_minus = std::move(measured.y_minus);
    rec.g_hat = g.components;
    rec.step = step.step;
    rec.error = error_metric(theta.values(), optimum, std::max<std::int64_t>(capacity, 1));

    theta = sdcp_step(theta, g, step.step);
    require(std::abs(std::accumulate(theta.values().begin(), theta.values().end(), 0.0) - budget) <= kFeasibilityTol,
            "virtual allocation left the simplex");
    state = std::move(step.state);
    trace.records.push_back(std::move(rec));

    if (churn) {
      advance_catalog(*churn, workloads, cfg.slot_length, rng);
      optimum = current_optimum(workloads, capacity);
    }
  }
  summarize(trace);
  return trace;
}

Trace run_baseline(const ExperimentConfig& cfg, const IntegerAllocation& alloc) {
  cfg.validate();
  const std::size_t p = simulated_providers(cfg);
  const std::int64_t capacity = cfg.cache_slots;
  if (alloc.size() != p) throw std::invalid_argument("run_baseline: allocation size differs from provider count");
  if (!alloc.fits(capacity)) throw std::invalid_argument("run_baseline: allocation exceeds the cache");
  Rng rng = make_rng(cfg.seed);
  const double half = cfg.slot_length / 2.0;

  std::vector<CpWorkload> workloads = build_workloads(cfg);
  const std::optional<OnOffModel> churn = churn_model(cfg);
  if (churn) start_churn(*churn, workloads, rng);
  IntegerAllocation optimum = current_optimum(workloads, capacity);
  const std::vector<double> fixed = alloc.as_real();
  const VirtualAllocation theta{fixed, static_cast<double>(alloc.total())};
  const std::vector<double> zeros(p, 0.0);

  Trace trace;
  trace.seed = cfg.seed;
  const std::int64_t slots = slot_count(cfg);
  trace.records.reserve(static_cast<std::size_t>(slots));
  for (std::int64_t k = 1; k <= slots; ++k) {
    const WindowSample first = sample_window(workloads, alloc, half, rng);
    const WindowSample second = sample_window(workloads, alloc, half, rng);
    SlotRecord rec;
    rec.k = k;
    rec.sim_time = static_cast<double>(k) * cfg.slot_length;
    rec.theta = theta;
    rec.theta_plus = alloc;
    rec.theta_minus = alloc;
    rec.y_plus = first.miss_rates(half);
    rec.y_minus = second.miss_rates(half);
    rec.g_hat = zeros;
    rec.requests = first.total_requests() + second.total_requests();
    rec.misses = first.total_misses() + second.total_misses();
    rec.miss_ratio =
        rec.requests > 0 ? static_cast<double>(rec.misses) / static_cast<double>(rec.requests) : 0.0;
    rec.error = error_metric(fixed, optimum, std::max<std::int64_t>(capacity, 1));
    trace.records.push_back(std::move(rec));
    if (churn) {
      advance_catalog(*churn, workloads, cfg.slot_length, rng);
      optimum = current_optimum(workloads, capacity);
    }
  }
  summarize(trace);
  return trace;
}

ConfidenceInterval student_t_interval(std::span<const double> samples, double level) {
  ConfidenceInterval ci;
  if (samples.empty()) return ci;
  const auto n = static_cast<double>(samples.size());
  ci.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) return ci;
  double ss = 0.0;
  for (double x : samples) ss += (x - ci.mean) * (x - ci.mean);
  const double stddev = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
  ci.half_width = t * stddev / std::sqrt(n);
  return ci;
}

namespace {

ReplicationSet replicate(const ExperimentConfig& cfg, const ReplicationOptions& options,
                         const std::function<Trace(const ExperimentConfig&)>& run) {
  cfg.validate();
  const auto count = static_cast<std::size_t>(cfg.replications);
  std::vector<Trace> traces(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      ExperimentConfig local = cfg;
      local.seed = options.distinct_seeds ? cfg.seed + i : cfg.seed;
      try {
        traces[i] = run(local);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  ReplicationSet set;
  std::vector<double> ratios;
  std::vector<double> errors;
  for (const auto& t : traces) {
    ratios.push_back(t.summary.miss_ratio);
    errors.push_back(t.summary.mean_error);
  }
  set.miss_ratio = student_t_interval(ratios);
  set.error = student_t_interval(errors);
  set.traces = std::move(traces);
  return set;
}

}  // namespace

ReplicationSet run_replications(const ExperimentConfig& cfg, const ReplicationOptions& options) {
  return replicate(cfg, options, [](const ExperimentConfig& c) { return run_experiment(c); });
}

ReplicationSet run_baseline_replications(const ExperimentConfig& cfg, const IntegerAllocation& alloc,
                                         const ReplicationOptions& options) {
  return replicate(cfg, options, [&alloc](const ExperimentConfig& c) { return run_baseline(c, alloc); });
}

}  // namespace sdcp
