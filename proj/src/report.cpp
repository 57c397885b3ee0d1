#include "sdcp/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sdcp {

std::string format_number(double x) {
  // snprintf honours LC_NUMERIC; the program never changes it from "C".
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string trace_csv_header(std::size_t providers) {
  std::string h = "k,sim_time_s";
  for (const char* group : {"theta_", "theta_plus_", "theta_minus_", "y_plus_", "y_minus_"}) {
    for (std::size_t j = 1; j <= providers; ++j) h += "," + std::string(group) + std::to_string(j);
  }
  h += ",a_k,miss_ratio,error";
  return h;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  if (trace.records.empty()) throw std::invalid_argument("cannot write an empty trace");
  const std::size_t p = trace.records.front().theta.size();
  std::string line = trace_csv_header(p);
  line += '\n';
  out << line;
  for (const auto& r : trace.records) {
    line = std::to_string(r.k);
    line += ',' + format_number(r.sim_time);
    for (double x : r.theta.values()) line += ',' + format_number(x);
    for (auto x : r.theta_plus.slots()) line += ',' + std::to_string(x);
    for (auto x : r.theta_minus.slots()) line += ',' + std::to_string(x);
    for (double x : r.y_plus) line += ',' + format_number(x);
    for (double x : r.y_minus) line += ',' + format_number(x);
    line += ',' + format_number(r.step);
    line += ',' + format_number(r.miss_ratio);
    line += ',' + format_number(r.error);
    line += '\n';
    out << line;
  }
}

namespace {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace

void emit_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  if (trace.records.empty()) throw std::invalid_argument("cannot write an empty trace");
  write_file(path, [&](std::ostream& out) { write_trace_csv(trace, out); });
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "scenario,run,schedule,miss_ratio_mean,miss_ratio_ci_low,miss_ratio_ci_high,mean_error,replications,measured_from_s\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.run << ',' << r.schedule << ',' << format_number(r.miss_ratio.mean) << ','
        << format_number(r.miss_ratio.low()) << ',' << format_number(r.miss_ratio.high()) << ','
        << format_number(r.mean_error) << ',' << r.replications << ','
        << format_number(r.measured_from) << '\n';
  }
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_summary_csv(rows, out); });
}

}  // namespace sdcp
