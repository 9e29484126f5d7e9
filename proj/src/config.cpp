#include "zeno/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace zeno {

std::string_view to_string(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::missing_key: return "missing key";
    case ConfigError::Kind::unknown_key: return "unknown key";
    case ConfigError::Kind::unit_mismatch: return "unit mismatch";
    case ConfigError::Kind::out_of_range: return "out of range";
    case ConfigError::Kind::syntax: return "syntax error";
    case ConfigError::Kind::conflict: return "conflicting keys";
  }
  return "config error";
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

namespace {

using Kind = ConfigError::Kind;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Recursive-descent evaluator for + - * / ( ) with the constant pi and
// implicit multiplication ("2pi").
class Expression {
public:
  explicit Expression(std::string_view text) : text_{text} {}

  std::optional<double> evaluate() {
    const auto v = sum();
    skip_space();
    if (!v || pos_ != text_.size()) return std::nullopt;
    return v;
  }

private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<double> sum() {
    auto v = product();
    while (v) {
      if (accept('+')) {
        const auto r = product();
        if (!r) return std::nullopt;
        *v += *r;
      } else if (accept('-')) {
        const auto r = product();
        if (!r) return std::nullopt;
        *v -= *r;
      } else {
        break;
      }
    }
    return v;
  }

  std::optional<double> product() {
    auto v = unary();
    while (v) {
      skip_space();
      if (accept('*')) {
        const auto r = unary();
        if (!r) return std::nullopt;
        *v *= *r;
      } else if (accept('/')) {
        const auto r = unary();
        if (!r) return std::nullopt;
        *v /= *r;
      } else if (pos_ < text_.size() && (text_[pos_] == 'p' || text_[pos_] == '(')) {
        const auto r = unary();
        if (!r) return std::nullopt;
        *v *= *r;
      } else {
        break;
      }
    }
    return v;
  }

  std::optional<double> unary() {
    if (accept('-')) {
      const auto v = unary();
      return v ? std::optional<double>{-*v} : std::nullopt;
    }
    if (accept('+')) return unary();
    return primary();
  }

  std::optional<double> primary() {
    skip_space();
    if (accept('(')) {
      const auto v = sum();
      if (!v || !accept(')')) return std::nullopt;
      return v;
    }
    if (text_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc{} || end == begin) return std::nullopt;
    pos_ += static_cast<std::size_t>(end - begin);
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double evaluate(const std::string& key, std::string_view text) {
  const auto v = Expression{trim(text)}.evaluate();
  if (!v || !std::isfinite(*v)) {
    throw ConfigError(Kind::syntax, key, "config: cannot parse value of '" + key + "': '" + std::string(text) + "'");
  }
  return *v;
}

struct Unit {
  std::string_view suffix;
  double scale;
};

double with_unit(const std::string& key, std::string_view text, std::initializer_list<Unit> units,
                 std::string_view expected) {
  const std::string_view t = trim(text);
  for (const Unit& u : units) {
    if (ends_with(t, u.suffix)) {
      const double v = evaluate(key, t.substr(0, t.size() - u.suffix.size()));
      return u.scale == 1.0 ? v : v * u.scale;
    }
  }
  throw ConfigError(Kind::unit_mismatch, key,
                    "config: '" + key + "' needs an explicit unit (" + std::string(expected) + "), got '" +
                        std::string(t) + "'");
}

double time_value(const std::string& key, std::string_view text) {
  const std::string_view t = trim(text);
  // Reject frequency-like suffixes that also end in 's' before matching seconds.
  if (ends_with(t, "/s")) {
    throw ConfigError(Kind::unit_mismatch, key, "config: '" + key + "' is a time, got a rate: '" + std::string(t) + "'");
  }
  if (ends_with(t, "ms")) return evaluate(key, t.substr(0, t.size() - 2)) / 1e3;
  if (ends_with(t, "us")) return evaluate(key, t.substr(0, t.size() - 2)) / 1e6;
  return with_unit(key, t, {{"s", 1.0}}, "s, ms or us");
}

double frequency_value(const std::string& key, std::string_view text) {
  return with_unit(key, text, {{"rad/s", 1.0}, {"kHz", 2e3 * std::numbers::pi}, {"Hz", 2.0 * std::numbers::pi}},
                   "rad/s, Hz or kHz");
}

double rate_value(const std::string& key, std::string_view text) {
  // "/s" only: a "1/s" suffix cannot be told apart from a trailing digit ("51/s")
  return with_unit(key, text, {{"/s", 1.0}}, "/s");
}

double angle_value(const std::string& key, std::string_view text) {
  std::string_view t = trim(text);
  if (ends_with(t, "rad")) t = t.substr(0, t.size() - 3);
  if (t.find_first_of("Hzsm") != std::string_view::npos) {
    throw ConfigError(Kind::unit_mismatch, key, "config: '" + key + "' is an angle, got '" + std::string(t) + "'");
  }
  return evaluate(key, t);
}

double plain_value(const std::string& key, std::string_view text) {
  const std::string_view t = trim(text);
  if (!t.empty() && std::isalpha(static_cast<unsigned char>(t.back())) && t.back() != 'i') {
    throw ConfigError(Kind::unit_mismatch, key, "config: '" + key + "' is dimensionless, got '" + std::string(t) + "'");
  }
  return evaluate(key, t);
}

std::uint64_t integer_value(const std::string& key, std::string_view text) {
  const std::string_view t = trim(text);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ConfigError(Kind::out_of_range, key, "config: '" + key + "' exceeds 64 bits");
  }
  if (ec != std::errc{} || end != t.data() + t.size()) {
    throw ConfigError(Kind::syntax, key, "config: '" + key + "' must be a non-negative integer, got '" + std::string(t) + "'");
  }
  return value;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(Kind::out_of_range, key, "config: '" + key + "' " + what);
}

double probability(const std::string& key, std::string_view text) {
  const double p = plain_value(key, text);
  require(p >= 0.0 && p <= 1.0, key, "must lie in [0, 1]");
  return p;
}

double non_negative(double v, const std::string& key) {
  require(v >= 0.0, key, "must be >= 0");
  return v;
}

std::uint64_t positive(std::uint64_t v, const std::string& key) {
  require(v > 0, key, "must be > 0");
  return v;
}

bool boolean_value(const std::string& key, std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(Kind::syntax, key, "config: '" + key + "' must be true or false");
}

const std::map<std::string, int, std::less<>>& known_keys() {
  static const std::map<std::string, int, std::less<>> keys = {
      {"protocol", 0},  {"theta", 0},        {"omega", 0},        {"tau", 0},
      {"detuning", 0},  {"phase", 0},        {"probe", 0},        {"lambda_on", 0},
      {"lambda_off", 0}, {"threshold", 0},   {"dephasing", 0},    {"zeeman", 0},
      {"prep_error", 0}, {"prep_sink", 0},   {"measurements", 0}, {"series", 0},
      {"n", 0},         {"variant", 0},      {"seed", 0},         {"reprepare", 0},
      {"scan_step", 0}, {"scan_steps", 0},   {"scan_trajectories", 0}};
  return keys;
}

std::map<std::string, std::string, std::less<>> split_entries(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  auto add = [&](std::string_view item) {
    item = trim(item);
    if (item.empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(Kind::syntax, std::string(item), "config: expected key=value, got '" + std::string(item) + "'");
    }
    std::string key(trim(item.substr(0, eq)));
    const std::string_view value = trim(item.substr(eq + 1));
    if (!known_keys().contains(key)) throw ConfigError(Kind::unknown_key, key, "config: unknown key '" + key + "'");
    if (entries.contains(key)) throw ConfigError(Kind::conflict, key, "config: key '" + key + "' given twice");
    entries.emplace(std::move(key), std::string(value));
  };
  // a comment runs to the end of its line, commas included
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (std::size_t start = 0;;) {
      const std::size_t comma = line.find(',', start);
      add(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return entries;
}

Protocol protocol_value(const std::string& value) {
  if (value == "zeno") return Protocol::zeno;
  if (value == "fractionated") return Protocol::fractionated;
  if (value == "rabi") return Protocol::rabi;
  if (value == "ramsey") return Protocol::ramsey;
  throw ConfigError(Kind::syntax, "protocol", "config: protocol must be zeno, fractionated, rabi or ramsey");
}

Variant variant_value(const std::string& value) {
  if (value == "a" || value == "single_pi") return Variant::single_pi;
  if (value == "b" || value == "fractionated_no_probe") return Variant::fractionated_no_probe;
  if (value == "c" || value == "fractionated_with_probe") return Variant::fractionated_with_probe;
  throw ConfigError(Kind::syntax, "variant", "config: variant must be a, b or c");
}

PrepSink sink_value(const std::string& value) {
  if (value == "upper") return PrepSink::upper;
  if (value == "zeeman") return PrepSink::zeeman;
  throw ConfigError(Kind::syntax, "prep_sink", "config: prep_sink must be upper or zeeman");
}

}  // namespace

double parse_angle(std::string_view text) { return angle_value("angle", text); }

ExperimentConfig parse_config(std::string_view text) { return parse_config(text, {}); }

ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  auto entries = split_entries(text);
  for (const auto& [key, value] : overrides) {
    if (!known_keys().contains(key)) throw ConfigError(Kind::unknown_key, key, "config: unknown key '" + key + "'");
    entries.insert_or_assign(key, value);
  }
  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  ExperimentConfig c;
  if (const auto* v = get("protocol")) {
    c.protocol = protocol_value(*v);
  } else if (get("n") || get("variant") || get("series")) {
    c.protocol = Protocol::fractionated;
  }

  if (const auto* v = get("variant")) c.variant = variant_value(*v);
  if (const auto* v = get("n")) {
    c.fractionation = static_cast<unsigned>(positive(integer_value("n", *v), "n"));
  } else if (c.protocol == Protocol::fractionated && c.variant != Variant::single_pi) {
    throw ConfigError(Kind::missing_key, "n", "config: missing required key 'n' for fractionated runs");
  }

  switch (c.protocol) {
    case Protocol::zeno: c.pulse.duration = 4.9e-3; c.probe_duration = 2e-3; break;
    case Protocol::fractionated: c.pulse.duration = 2.9e-3; c.probe_duration = 3e-3; break;
    case Protocol::rabi: c.pulse.duration = 4.9e-3; c.probe_duration = 2e-3; break;
    case Protocol::ramsey: c.pulse.duration = 2e-3; c.probe_duration = 2e-3; break;
  }
  if (const auto* v = get("tau")) c.pulse.duration = non_negative(time_value("tau", *v), "tau");
  if (const auto* v = get("probe")) c.probe_duration = non_negative(time_value("probe", *v), "probe");

  const auto* theta = get("theta");
  const auto* omega = get("omega");
  if (theta && omega) throw ConfigError(Kind::conflict, "theta", "config: give either 'theta' or 'omega', not both");
  if (omega) {
    c.pulse.rabi_frequency = non_negative(frequency_value("omega", *omega), "omega");
  } else {
    double area = 0.0;
    if (theta) {
      area = non_negative(angle_value("theta", *theta), "theta");
    } else if (c.protocol == Protocol::fractionated) {
      area = std::numbers::pi / c.fractionation;
    } else {
      throw ConfigError(Kind::missing_key, "theta", "config: missing required key 'theta' (or 'omega')");
    }
    require(area == 0.0 || c.pulse.duration > 0.0, "tau", "must be > 0 to realize a non-zero pulse area");
    c.pulse.rabi_frequency = area == 0.0 ? 0.0 : area / c.pulse.duration;
  }
  if (const auto* v = get("detuning")) c.pulse.detuning = frequency_value("detuning", *v);
  if (const auto* v = get("phase")) c.pulse.phase = angle_value("phase", *v);

  if (const auto* v = get("lambda_on")) c.detector.mean_counts_bright = non_negative(plain_value("lambda_on", *v), "lambda_on");
  if (const auto* v = get("lambda_off")) c.detector.mean_counts_dark = non_negative(plain_value("lambda_off", *v), "lambda_off");
  if (const auto* v = get("threshold")) c.detector.threshold = static_cast<std::uint32_t>(positive(integer_value("threshold", *v), "threshold"));

  if (const auto* v = get("dephasing")) c.noise.dephasing_rate = non_negative(rate_value("dephasing", *v), "dephasing");
  if (const auto* v = get("zeeman")) c.noise.zeeman_pump_prob = probability("zeeman", *v);
  if (const auto* v = get("prep_error")) c.noise.preparation_error = probability("prep_error", *v);
  if (const auto* v = get("prep_sink")) c.noise.prep_sink = sink_value(*v);

  if (const auto* v = get("measurements")) c.measurements = positive(integer_value("measurements", *v), "measurements");
  if (const auto* v = get("series")) {
    c.series = positive(integer_value("series", *v), "series");
  } else {
    c.series = std::max<std::size_t>(1, 2000 / c.fractionation);
  }
  if (const auto* v = get("seed")) c.master_seed = integer_value("seed", *v);
  if (const auto* v = get("reprepare")) c.reprepare_after_on = boolean_value("reprepare", *v);

  if (const auto* v = get("scan_step")) c.scan.step = time_value("scan_step", *v);
  if (const auto* v = get("scan_steps")) c.scan.steps = positive(integer_value("scan_steps", *v), "scan_steps");
  if (const auto* v = get("scan_trajectories")) c.scan.trajectories = positive(integer_value("scan_trajectories", *v), "scan_trajectories");

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(Kind::out_of_range, "", std::string("config: ") + e.what());
  }
  return c;
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) { out << key << '=' << value << '\n'; };
  line("protocol", std::string(to_string(c.protocol)));
  line("omega", format_double(c.pulse.rabi_frequency) + "rad/s");
  line("tau", format_double(c.pulse.duration) + "s");
  line("detuning", format_double(c.pulse.detuning) + "rad/s");
  line("phase", format_double(c.pulse.phase) + "rad");
  line("probe", format_double(c.probe_duration) + "s");
  line("lambda_on", format_double(c.detector.mean_counts_bright));
  line("lambda_off", format_double(c.detector.mean_counts_dark));
  line("threshold", std::to_string(c.detector.threshold));
  line("dephasing", format_double(c.noise.dephasing_rate) + "/s");
  line("zeeman", format_double(c.noise.zeeman_pump_prob));
  line("prep_error", format_double(c.noise.preparation_error));
  line("prep_sink", c.noise.prep_sink == PrepSink::upper ? "upper" : "zeeman");
  line("measurements", std::to_string(c.measurements));
  line("series", std::to_string(c.series));
  line("n", std::to_string(c.fractionation));
  line("variant", std::string(to_string(c.variant)));
  line("seed", std::to_string(c.master_seed));
  line("reprepare", c.reprepare_after_on ? "true" : "false");
  line("scan_step", format_double(c.scan.step) + "s");
  line("scan_steps", std::to_string(c.scan.steps));
  line("scan_trajectories", std::to_string(c.scan.trajectories));
  return out.str();
}

}  // namespace zeno
