// On-disk formats.
//
// Trajectory and series files share one layout: a header of key=value lines
// (the canonical configuration plus `length=`), one column-name line, then
// comma-separated records.
//
//   trajectory columns: index,photon_count,classified_bit,true_manifold
//   series columns:     index,prepared_ok,counts,bits,true_bits
//
// In series records `counts` is ';'-separated and `bits` / `true_bits` are
// strings of '0'/'1', one character per probe in schedule order.
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeno/protocols.hpp"

namespace zeno {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_{line} {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct TrajectoryRecord {
  std::size_t index = 0;
  std::uint32_t photon_count = 0;
  Bit classified_bit = 0;
  std::optional<Bit> true_manifold;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct TrajectoryFile {
  ExperimentConfig config;
  std::vector<TrajectoryRecord> records;

  [[nodiscard]] std::vector<Bit> bits(bool use_truth) const;
};

struct SeriesFile {
  ExperimentConfig config;
  std::vector<SeriesRecord> records;
};

void write_trajectory(std::ostream& out, const Trajectory& trajectory, bool with_truth = true);
void write_series(std::ostream& out, const ExperimentConfig& config,
                  const std::vector<SeriesRecord>& records, bool with_truth = true);

/// The `protocol=` header value of a data file, without parsing the records.
Protocol peek_protocol(std::istream& in);

TrajectoryFile read_trajectory(std::istream& in);
SeriesFile read_series(std::istream& in);

/// Lower-case hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string config;  ///< canonical configuration text
  std::uint64_t master_seed = 0;
  std::string tool_version{kToolVersion};
  std::map<std::string, std::string> digests;  ///< file name -> SHA-256

  [[nodiscard]] std::string to_json() const;
  static RunManifest from_json(std::string_view text);

  bool operator==(const RunManifest&) const = default;
};

std::string read_text_file(const std::filesystem::path& path);
/// Throws std::runtime_error if the path is unwritable.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace zeno
