#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oracles.hpp"
#include "sdcp/workload.hpp"

using namespace sdcp;

namespace {

std::shared_ptr<const Popularity> shared_zipf(std::size_t n, double alpha) {
  return std::make_shared<const Popularity>(zipf_popularity(n, alpha));
}

}  // namespace

TEST_CASE("zipf_popularity") {
  const auto p = zipf_popularity(3, 1.0);
  CHECK(p.probs[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
  CHECK(p.probs[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-15));
  CHECK(p.probs[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-15));
  CHECK(p.tail[0] == doctest::Approx(1.0));
  CHECK(p.tail[3] == 0.0);

  const auto flat = zipf_popularity(5, 0.0);
  for (double x : flat.probs) CHECK(x == doctest::Approx(0.2));
  CHECK(zipf_popularity(1, 3.0).probs == std::vector<double>{1.0});

  const auto big = zipf_popularity(100000, 0.8);
  CHECK(std::accumulate(big.probs.begin(), big.probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::is_sorted(big.probs.rbegin(), big.probs.rend()));
  for (std::size_t k : {0u, 1u, 10u, 777u, 5000u}) {
    CHECK(big.tail[k] == doctest::Approx(testing::zipf_tail(100000, 0.8, k)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(zipf_popularity(0, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(zipf_popularity(10, -0.5), std::invalid_argument);
}

TEST_CASE("miss_intensity") {
  const CpWorkload w(100.0, shared_zipf(3, 1.0));
  CHECK(miss_intensity(w, 0) == doctest::Approx(100.0));
  CHECK(miss_intensity(w, 1) == doctest::Approx(100.0 * 5.0 / 11.0));
  CHECK(miss_intensity(w, 1) == doctest::Approx(45.4545).epsilon(1e-5));
  CHECK(miss_intensity(w, 3) == 0.0);
  CHECK(miss_intensity(w, 50) == 0.0);
  CHECK(miss_intensity(CpWorkload(0.0, shared_zipf(3, 1.0)), 1) == 0.0);
}

TEST_CASE("miss curves are strictly decreasing and strictly convex") {
  for (double alpha : {0.5, 0.8, 1.2}) {
    const CpWorkload w(37.0, shared_zipf(2000, alpha));
    double prev_gain = -INFINITY;
    for (std::int64_t s = 0; s + 1 < 2000; ++s) {
      const double step = miss_intensity(w, s + 1) - miss_intensity(w, s);
      CHECK(step < 0.0);
      CHECK(step > prev_gain);
      prev_gain = step;
    }
  }
}

TEST_CASE("sampled miss rates are unbiased") {
  std::vector<CpWorkload> ws{CpWorkload(13.0, shared_zipf(500, 0.8)), CpWorkload(75.0, shared_zipf(500, 0.8)),
                             CpWorkload(2.0, shared_zipf(500, 0.8)), CpWorkload(10.0, shared_zipf(500, 0.8))};
  const IntegerAllocation alloc({20, 100, 0, 500});
  Rng rng = make_rng(3);
  const double duration = 5.0;
  const int reps = 10000;
  std::vector<double> sum(4, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto y = measure_miss_rates(ws, alloc, duration, rng);
    for (std::size_t p = 0; p < 4; ++p) sum[p] += y[p];
  }
  for (std::size_t p = 0; p < 4; ++p) {
    const double expected = miss_intensity(ws[p], alloc[p]);
    // Var(misses) = rate * duration * q for Poisson thinning.
    const double sigma = std::sqrt(expected * duration) / duration / std::sqrt(static_cast<double>(reps));
    CHECK(std::abs(sum[p] / reps - expected) <= 3 * sigma + 1e-12);
  }
  CHECK(sum[3] == 0.0);
}

TEST_CASE("long windows converge to the expected intensity") {
  std::vector<CpWorkload> ws{CpWorkload(100.0, shared_zipf(1000, 0.8))};
  const IntegerAllocation alloc({50});
  Rng rng = make_rng(4);
  double sum = 0.0;
  for (int r = 0; r < 100; ++r) sum += measure_miss_rates(ws, alloc, 10000.0, rng)[0];
  CHECK(sum / 100 == doctest::Approx(miss_intensity(ws[0], 50)).epsilon(0.01));
}

TEST_CASE("measurement arguments and reproducibility") {
  std::vector<CpWorkload> ws{CpWorkload(10.0, shared_zipf(10, 0.8)), CpWorkload(0.0, shared_zipf(10, 0.8))};
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(measure_miss_rates(ws, IntegerAllocation({1, 1}), 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(measure_miss_rates(ws, IntegerAllocation({1}), 1.0, rng), std::invalid_argument);
  for (int i = 0; i < 100; ++i) CHECK(measure_miss_rates(ws, IntegerAllocation({0, 0}), 1.0, rng)[1] == 0.0);

  Rng a = make_rng(42);
  Rng b = make_rng(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(measure_miss_rates(ws, IntegerAllocation({3, 1}), 5.0, a) ==
          measure_miss_rates(ws, IntegerAllocation({3, 1}), 5.0, b));
  }
}

TEST_CASE("active catalog queries match a direct scan") {
  const std::size_t n = 3000;
  const auto pop = shared_zipf(n, 0.8);
  Rng rng = make_rng(8);
  std::bernoulli_distribution coin(0.3);
  std::vector<bool> on(n);
  for (std::size_t i = 0; i < n; ++i) on[i] = coin(rng);
  ActiveCatalog cat(pop, on);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int round = 0; round < 20; ++round) {
    for (int f = 0; f < 200; ++f) {
      const std::size_t i = pick(rng);
      on[i] = !on[i];
      cat.set(i, on[i]);
    }
    double mass = 0.0;
    std::size_t count = 0;
    std::vector<double> prefix{0.0};
    for (std::size_t i = 0; i < n; ++i) {
      if (!on[i]) continue;
      mass += pop->probs[i];
      ++count;
      prefix.push_back(mass);
    }
    CHECK(cat.active_count() == count);
    CHECK(cat.active_mass() == doctest::Approx(mass).epsilon(1e-12));
    for (std::int64_t k : {0L, 1L, 7L, 100L, 500L, static_cast<long>(count), static_cast<long>(count) + 10}) {
      const double expected = prefix[static_cast<std::size_t>(std::min<std::int64_t>(k, count))];
      CHECK(cat.top_mass(k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("miss probability renormalizes over the active set") {
  CpWorkload w(10.0, shared_zipf(3, 1.0));
  w.active = ActiveCatalog(w.popularity, {false, true, true});
  // Active masses 3/11 and 2/11: caching one slot keeps the rank-2 object.
  CHECK(miss_probability(w, 0) == doctest::Approx(1.0));
  CHECK(miss_probability(w, 1) == doctest::Approx(2.0 / 5.0));
  CHECK(miss_probability(w, 2) == 0.0);
  w.active = ActiveCatalog(w.popularity, {false, false, false});
  CHECK(miss_probability(w, 0) == 0.0);
}

TEST_CASE("ON/OFF churn") {
  const OnOffModel model;
  CHECK(model.on_fraction() == doctest::Approx(0.1));
  CHECK_THROWS_AS((OnOffModel{0.0, 1.0, 1.0}).validate(), std::invalid_argument);

  SUBCASE("long-run ON fraction over 1e5 object-days") {
    std::vector<CpWorkload> ws{CpWorkload(1.0, shared_zipf(1000, 0.8))};
    Rng rng = make_rng(12);
    start_churn(model, ws, rng);
    std::size_t on_days = 0;
    for (int day = 0; day < 100; ++day) {
      advance_catalog(model, ws, 86400.0, rng);
      on_days += ws[0].active->active_count();
    }
    CHECK(static_cast<double>(on_days) / 1e5 == doctest::Approx(0.1).epsilon(0.1));
  }
  SUBCASE("dt = 0 changes nothing") {
    std::vector<CpWorkload> ws{CpWorkload(1.0, shared_zipf(1000, 0.8))};
    Rng rng = make_rng(13);
    start_churn(model, ws, rng);
    const auto before = ws[0].active->active_count();
    CHECK(advance_catalog(model, ws, 0.0, rng) == 0);
    CHECK(ws[0].active->active_count() == before);
  }
  SUBCASE("all ON: flips over a short interval follow the exponential rate") {
    const std::size_t n = 100000;
    std::vector<CpWorkload> ws{CpWorkload(1.0, shared_zipf(n, 0.8))};
    Rng rng = make_rng(14);
    start_churn(model, ws, rng, ChurnStart::all_on);
    const double eps = 864.0;
    const double expected = static_cast<double>(n) * (1.0 - std::exp(-eps / model.mean_on));
    const auto flips = static_cast<double>(advance_catalog(model, ws, eps, rng));
    CHECK(std::abs(flips - expected) < 3 * std::sqrt(expected));
  }
  SUBCASE("rates are rescaled to the target total") {
    const OnOffModel m{86400.0, 9 * 86400.0, 100.0};
    std::vector<CpWorkload> ws{CpWorkload(13.0, shared_zipf(5000, 0.8)), CpWorkload(75.0, shared_zipf(5000, 0.8)),
                               CpWorkload(12.0, shared_zipf(5000, 0.8)), CpWorkload(0.0, shared_zipf(1, 0.8))};
    Rng rng = make_rng(15);
    start_churn(m, ws, rng);
    for (int step = 0; step < 50; ++step) {
      advance_catalog(m, ws, 3600.0, rng);
      double total = 0.0;
      for (const auto& w : ws) total += w.rate;
      CHECK(total == doctest::Approx(100.0).epsilon(1e-12));
      CHECK(ws[3].rate == 0.0);
    }
  }
}
