#pragma once

// CSV output for slot traces and scenario summaries. Numbers use 12
// significant digits, '.' decimal point, ',' separator and LF line endings.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "sdcp/engine.hpp"

namespace sdcp {

/// "%.12g" of x, independent of the global locale.
std::string format_number(double x);

/// Header: k, sim_time_s, theta_1..P, theta_plus_1..P, theta_minus_1..P,
/// y_plus_1..P, y_minus_1..P, a_k, miss_ratio, error.
std::string trace_csv_header(std::size_t providers);

/// Throws std::invalid_argument for an empty trace.
void write_trace_csv(const Trace& trace, std::ostream& out);

/// Throws std::runtime_error when the file cannot be written.
void emit_trace_csv(const Trace& trace, const std::filesystem::path& path);

struct SummaryRow {
  std::string scenario;
  std::string run;       // e.g. "sdcp", "opt", "unif", "T=10", "tau=3h"
  std::string schedule;  // schedule name, or "fixed" for baselines
  ConfidenceInterval miss_ratio;
  double mean_error = 0.0;
  int replications = 0;
  double measured_from = 0.0;  // miss ratio pools slots ending after this time (s)
};

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

}  // namespace sdcp
