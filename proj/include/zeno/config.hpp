// Human-readable key=value experiment configuration.
//
// Entries are separated by newlines or commas; '#' starts a comment.  Times
// carry an explicit unit (s, ms, us), angular frequencies rad/s, Hz or kHz,
// rates per second ("3.5/s"); angles are expressions in pi ("pi/5", "2pi-0.1") with an
// optional "rad" suffix.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "zeno/protocols.hpp"

namespace zeno {

class ConfigError : public std::runtime_error {
public:
  enum class Kind { missing_key, unknown_key, unit_mismatch, out_of_range, syntax, conflict };

  ConfigError(Kind kind, std::string key, const std::string& message)
      : std::runtime_error(message), kind_{kind}, key_{std::move(key)} {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
  Kind kind_;
  std::string key_;
};

std::string_view to_string(ConfigError::Kind kind);

/// Parses and validates a configuration, filling unspecified keys with the
/// protocol defaults (Zeno: 4.9 ms drive, 2 ms probe; fractionated: 2.9 ms
/// drive, 3 ms probe, floor(2000/n) series).
ExperimentConfig parse_config(std::string_view text);

/// Key=value overrides applied on top of a config text (command-line flags).
using ConfigOverrides = std::map<std::string, std::string, std::less<>>;

/// As parse_config, with `overrides` replacing same-named keys of `text`.
ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides);

/// Canonical text form; parse_config(emit_config(c)) == c exactly.
std::string emit_config(const ExperimentConfig& config);

/// Evaluates an angle expression such as "pi/2", "1.03*pi" or "2pi-0.1rad".
double parse_angle(std::string_view text);

/// Shortest round-trip, locale-independent decimal form.
std::string format_double(double value);

}  // namespace zeno
