#include "zeno/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "zeno/config.hpp"

namespace zeno {

namespace {

constexpr std::string_view kTrajectoryColumns = "index,photon_count,classified_bit,true_manifold";
constexpr std::string_view kSeriesColumns = "index,prepared_ok,counts,bits,true_bits";

char bit_char(Bit b) { return b ? '1' : '0'; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

Bit parse_bit(std::string_view text, std::size_t line) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw ParseError(line, "expected bit 0 or 1, got '" + std::string(text) + "'");
}

std::vector<Bit> parse_bit_string(std::string_view text, std::size_t line) {
  std::vector<Bit> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw ParseError(line, "invalid bit string '" + std::string(text) + "'");
    bits.push_back(static_cast<Bit>(ch - '0'));
  }
  return bits;
}

struct Header {
  ExperimentConfig config;
  std::size_t length = 0;
  std::size_t line = 0;  ///< lines consumed, including the column line
};

Header read_header(std::istream& in, std::string_view columns) {
  std::string config_text;
  std::optional<std::size_t> length;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == columns) {
      if (!length) throw ParseError(n, "header lacks 'length='");
      Header h;
      try {
        h.config = parse_config(config_text);
      } catch (const ConfigError& e) {
        throw ParseError(n, std::string("bad header: ") + e.what());
      }
      h.length = *length;
      h.line = n;
      return h;
    }
    if (line.rfind("length=", 0) == 0) {
      length = parse_number<std::size_t>(std::string_view(line).substr(7), n, "length");
    } else if (line.find('=') != std::string::npos) {
      config_text += line;
      config_text += '\n';
    } else {
      throw ParseError(n, "expected key=value header or column line '" + std::string(columns) + "'");
    }
  }
  throw ParseError(n + 1, n == 0 ? "empty file" : "missing column line '" + std::string(columns) + "'");
}

template <typename RecordFn>
std::size_t read_records(std::istream& in, std::size_t first_line, RecordFn&& fn) {
  std::string line;
  std::size_t n = first_line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(std::string_view(line), n, count);
    ++count;
  }
  return count;
}

}  // namespace

std::vector<Bit> TrajectoryFile::bits(bool use_truth) const {
  std::vector<Bit> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (use_truth && !r.true_manifold) throw std::runtime_error("trajectory file has no simulation-truth column");
    out.push_back(use_truth ? *r.true_manifold : r.classified_bit);
  }
  return out;
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory, bool with_truth) {
  out << emit_config(trajectory.config);
  out << "length=" << trajectory.outcomes.size() << '\n';
  out << kTrajectoryColumns << '\n';
  std::size_t index = 0;
  for (const auto& o : trajectory.outcomes) {
    out << index++ << ',' << o.photon_count << ',' << bit_char(o.classified_bit) << ',';
    if (with_truth) out << bit_char(o.true_manifold);
    out << '\n';
  }
}

void write_series(std::ostream& out, const ExperimentConfig& config, const std::vector<SeriesRecord>& records,
                  bool with_truth) {
  out << emit_config(config);
  out << "length=" << records.size() << '\n';
  out << kSeriesColumns << '\n';
  std::size_t index = 0;
  for (const auto& r : records) {
    out << index++ << ',' << (r.prepared_ok ? '1' : '0') << ',';
    for (std::size_t k = 0; k < r.counts.size(); ++k) out << (k ? ";" : "") << r.counts[k];
    out << ',';
    for (Bit b : r.intermediate_bits) out << bit_char(b);
    out << bit_char(r.final_bit) << ',';
    if (with_truth) {
      for (Bit b : r.true_bits) out << bit_char(b);
    }
    out << '\n';
  }
}

Protocol peek_protocol(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.rfind("protocol=", 0) == 0) {
      const std::string_view value = std::string_view(line).substr(9);
      for (Protocol p : {Protocol::zeno, Protocol::fractionated, Protocol::rabi, Protocol::ramsey}) {
        if (value == to_string(p)) return p;
      }
      throw ParseError(n, "unknown protocol '" + std::string(value) + "'");
    }
    if (line.find('=') == std::string::npos) break;
  }
  throw ParseError(n == 0 ? 1 : n, n == 0 ? "empty file" : "missing 'protocol=' header");
}

TrajectoryFile read_trajectory(std::istream& in) {
  const Header h = read_header(in, kTrajectoryColumns);
  TrajectoryFile file;
  file.config = h.config;
  file.records.reserve(h.length);
  const std::size_t count = read_records(in, h.line, [&](std::string_view line, std::size_t n, std::size_t k) {
    const auto f = split(line, ',');
    if (f.size() != 4) throw ParseError(n, "expected 4 fields, got " + std::to_string(f.size()));
    TrajectoryRecord r;
    r.index = parse_number<std::size_t>(f[0], n, "index");
    if (r.index != k) throw ParseError(n, "record index out of order");
    r.photon_count = parse_number<std::uint32_t>(f[1], n, "photon count");
    r.classified_bit = parse_bit(f[2], n);
    if (!f[3].empty()) r.true_manifold = parse_bit(f[3], n);
    file.records.push_back(r);
  });
  if (count != h.length) {
    throw ParseError(h.line + count + 1, "header declares " + std::to_string(h.length) + " records, found " +
                                             std::to_string(count));
  }
  return file;
}

SeriesFile read_series(std::istream& in) {
  const Header h = read_header(in, kSeriesColumns);
  SeriesFile file;
  file.config = h.config;
  file.records.reserve(h.length);
  const std::size_t expected_bits =
      h.config.variant == Variant::fractionated_with_probe ? h.config.fractionation : 1;
  const std::size_t count = read_records(in, h.line, [&](std::string_view line, std::size_t n, std::size_t k) {
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(n, "expected 5 fields, got " + std::to_string(f.size()));
    if (parse_number<std::size_t>(f[0], n, "index") != k) throw ParseError(n, "record index out of order");
    SeriesRecord r;
    r.prepared_ok = parse_bit(f[1], n) == 1;
    for (std::string_view c : split(f[2], ';')) r.counts.push_back(parse_number<std::uint32_t>(c, n, "photon count"));
    std::vector<Bit> bits = parse_bit_string(f[3], n);
    if (bits.size() != expected_bits || r.counts.size() != expected_bits) {
      throw ParseError(n, "probe count does not match variant/n in header");
    }
    r.final_bit = bits.back();
    bits.pop_back();
    r.intermediate_bits = std::move(bits);
    r.true_bits = parse_bit_string(f[4], n);
    if (!r.true_bits.empty() && r.true_bits.size() != expected_bits) {
      throw ParseError(n, "truth column length does not match variant/n in header");
    }
    file.records.push_back(std::move(r));
  });
  if (count != h.length) {
    throw ParseError(h.line + count + 1, "header declares " + std::to_string(h.length) + " records, found " +
                                             std::to_string(count));
  }
  return file;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * size);
  for (unsigned int i = 0; i < size; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "zeno";
  j["tool_version"] = tool_version;
  j["master_seed"] = master_seed;
  j["config"] = config;
  j["digests"] = nlohmann::ordered_json::object();
  for (const auto& [name, digest] : digests) j["digests"][name] = digest;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.config = j.at("config").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& [name, digest] : j.at("digests").items()) m.digests[name] = digest.get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("manifest: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace zeno
