#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sdcp/report.hpp"

using namespace sdcp;

namespace {

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(249.5) == "249.5");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("trace header layout") {
  CHECK(trace_csv_header(2) ==
        "k,sim_time_s,theta_1,theta_2,theta_plus_1,theta_plus_2,theta_minus_1,theta_minus_2,"
        "y_plus_1,y_plus_2,y_minus_1,y_minus_2,a_k,miss_ratio,error");
}

TEST_CASE("one-slot P=2 trace") {
  ExperimentConfig c;
  c.cp_shares = {0.5, 0.5};
  c.cache_slots = 20;
  c.catalog_size = 1000;
  c.horizon = c.slot_length;
  const Trace t = run_experiment(c);
  std::ostringstream out;
  write_trace_csv(t, out);
  const std::string text = out.str();
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = lines(text);
  REQUIRE(rows.size() == 2);
  CHECK(count(rows[1], ',') == count(rows[0], ','));
  const auto& r = t.records[0];
  const std::string expected_prefix = "1,10," + format_number(r.theta[0]) + "," + format_number(r.theta[1]) + "," +
                                      std::to_string(r.theta_plus[0]) + ",";
  CHECK(rows[1].rfind(expected_prefix, 0) == 0);
  CHECK(rows[1].size() > expected_prefix.size());
  const std::string expected_suffix =
      "," + format_number(r.step) + "," + format_number(r.miss_ratio) + "," + format_number(r.error);
  CHECK(rows[1].substr(rows[1].size() - expected_suffix.size()) == expected_suffix);
}

TEST_CASE("P=4 rows carry five vector groups and five scalars") {
  ExperimentConfig c;
  c.horizon = 60.0;
  const Trace t = run_experiment(c);
  std::ostringstream out;
  write_trace_csv(t, out);
  const auto rows = lines(out.str());
  REQUIRE(rows.size() == 7);
  for (const auto& row : rows) CHECK(count(row, ',') + 1 == 5 * 4 + 5);
}

TEST_CASE("empty traces and unwritable paths are errors") {
  Trace empty;
  std::ostringstream out;
  CHECK_THROWS_AS(write_trace_csv(empty, out), std::invalid_argument);
  ExperimentConfig c;
  c.horizon = c.slot_length;
  CHECK_THROWS_AS(emit_trace_csv(run_experiment(c), "/nonexistent-dir/trace.csv"), std::runtime_error);
}

TEST_CASE("files are byte-identical across runs with one seed") {
  ExperimentConfig c;
  c.horizon = 600.0;
  c.seed = 5;
  const auto dir = std::filesystem::temp_directory_path() / "sdcp_report_test";
  std::filesystem::create_directories(dir);
  emit_trace_csv(run_experiment(c), dir / "a.csv");
  emit_trace_csv(run_experiment(c), dir / "b.csv");
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK_FALSE(slurp(dir / "a.csv").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary table") {
  std::vector<SummaryRow> rows{{"stepsize-compare", "conditional", "conditional", {0.5, 0.01}, 0.2, 20, 0.0},
                               {"stepsize-compare", "opt", "fixed", {0.25, 0.0}, 0.0, 20, 0.0}};
  std::ostringstream out;
  write_summary_csv(rows, out);
  const auto l = lines(out.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0] ==
        "scenario,run,schedule,miss_ratio_mean,miss_ratio_ci_low,miss_ratio_ci_high,mean_error,replications,"
        "measured_from_s");
  CHECK(l[1] == "stepsize-compare,conditional,conditional,0.5,0.49,0.51,0.2,20,0");
  CHECK(l[2] == "stepsize-compare,opt,fixed,0.25,0.25,0.25,0,20,0");
}
