#include "sdcp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace sdcp {

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(std::string_view text) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

double finite_duration(std::string_view text) {
  const double d = parse_duration(text);
  if (!std::isfinite(d)) throw std::invalid_argument("duration must be finite");
  return d;
}

struct Settings {
  ExperimentConfig cfg;
  bool nonstationary = false;
  OnOffModel churn;
};

using Setter = std::function<void(Settings&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"K", [](Settings& s, std::string_view v) { s.cfg.cache_slots = parse_int<std::int64_t>(v); }},
      {"T", [](Settings& s, std::string_view v) { s.cfg.slot_length = finite_duration(v); }},
      {"horizon", [](Settings& s, std::string_view v) { s.cfg.horizon = finite_duration(v); }},
      {"cp_shares", [](Settings& s, std::string_view v) { s.cfg.cp_shares = parse_list(v); }},
      {"total_rate", [](Settings& s, std::string_view v) { s.cfg.total_rate = parse_double(v); }},
      {"catalog_size", [](Settings& s, std::string_view v) { s.cfg.catalog_size = parse_int<std::size_t>(v); }},
      {"alpha", [](Settings& s, std::string_view v) { s.cfg.alpha = parse_double(v); }},
      {"schedule", [](Settings& s, std::string_view v) { s.cfg.schedule = parse_schedule_kind(trim(v)); }},
      {"nu", [](Settings& s, std::string_view v) { s.cfg.nu = parse_double(v); }},
      {"b_ratio", [](Settings& s, std::string_view v) { s.cfg.b_ratio = parse_double(v); }},
      {"bootstrap", [](Settings& s, std::string_view v) { s.cfg.bootstrap_time = finite_duration(v); }},
      {"adaptive", [](Settings& s, std::string_view v) { s.cfg.adaptive_time = finite_duration(v); }},
      {"reinit_period",
       [](Settings& s, std::string_view v) {
         const double d = parse_duration(v);
         s.cfg.reinit_period = std::isfinite(d) ? std::optional<double>(d) : std::nullopt;
       }},
      {"nonstationary", [](Settings& s, std::string_view v) { s.nonstationary = parse_bool(v); }},
      {"mean_on", [](Settings& s, std::string_view v) { s.churn.mean_on = finite_duration(v); }},
      {"mean_off", [](Settings& s, std::string_view v) { s.churn.mean_off = finite_duration(v); }},
      {"seed", [](Settings& s, std::string_view v) { s.cfg.seed = parse_int<std::uint64_t>(v); }},
      {"replications", [](Settings& s, std::string_view v) { s.cfg.replications = parse_int<int>(v); }},
      {"initial_allocation",
       [](Settings& s, std::string_view v) {
         if (trim(v) == "uniform") {
           s.cfg.initial_allocation.reset();
         } else {
           s.cfg.initial_allocation = parse_list(v);
         }
       }},
  };
  return table;
}

}  // namespace

double parse_duration(std::string_view text) {
  text = trim(text);
  if (text == "inf") return std::numeric_limits<double>::infinity();
  double scale = 1.0;
  if (!text.empty()) {
    switch (text.back()) {
      case 's': scale = 1.0; break;
      case 'm': scale = 60.0; break;
      case 'h': scale = 3600.0; break;
      case 'd': scale = 86400.0; break;
      default: break;
    }
    if (std::string_view("smhd").find(text.back()) != std::string_view::npos) text.remove_suffix(1);
  }
  const double value = parse_double(text) * scale;
  if (value < 0.0) throw std::invalid_argument("duration must be nonnegative");
  return value;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view origin) {
  Settings settings;
  std::map<std::string, int, std::less<>> seen;
  const std::string where(origin);
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, where + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto prefix = where + ":" + std::to_string(line_no) + ": " + key;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, line_no, prefix + ": unknown key");
    if (seen.contains(key)) throw ConfigError(key, line_no, prefix + ": duplicate key");
    seen.emplace(key, line_no);
    try {
      it->second(settings, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line_no, prefix + ": " + e.what());
    } catch (const std::out_of_range&) {
      throw ConfigError(key, line_no, prefix + ": value out of range");
    }
  }

  if (settings.nonstationary) {
    settings.churn.target_total_rate = settings.cfg.total_rate;
    settings.cfg.churn = settings.churn;
  } else {
    for (const char* key : {"mean_on", "mean_off"}) {
      if (const auto s = seen.find(key); s != seen.end()) {
        throw ConfigError(key, s->second,
                          where + ":" + std::to_string(s->second) + ": " + key + ": requires nonstationary = true");
      }
    }
  }
  try {
    settings.cfg.validate();
  } catch (const InvalidConfig& e) {
    const std::string& key = e.field();
    const auto s = seen.find(key);
    const int line = s != seen.end() ? s->second : 0;
    throw ConfigError(key, line, where + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + e.what());
  }
  return settings.cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("path", 0, path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace sdcp
