#pragma once

// Output files: SHA-256 digests, CSV series and the binary accumulator dump.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tnt/ensemble.hpp"
#include "tnt/error.hpp"

namespace tnt::harness {

using Digest = std::array<unsigned char, 32>;

inline Digest sha256(std::string_view data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return out;
}

inline std::string to_hex(std::span<const unsigned char> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string sha256_file_hex(const std::filesystem::path& path) { return to_hex(sha256(read_file(path))); }

/// Round-trip exact decimal form of a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV table with '#'-prefixed metadata lines, then a header row.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(const std::string& key, const std::string& value) { meta_.push_back("# " + key + ": " + value); }

  void row(std::span<const double> values) {
    if (values.size() != columns_.size()) throw InvalidArgument("CSV row width does not match the header");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line.push_back(',');
      line += format_double(values[i]);
    }
    rows_.push_back(std::move(line));
  }
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

  std::string str() const {
    std::string out;
    for (const auto& m : meta_) out += m + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out.push_back(',');
      out += columns_[i];
    }
    out.push_back('\n');
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> meta_;
  std::vector<std::string> rows_;
};

/// Parsed CSV: metadata lines, header, numeric rows.
struct CsvTable {
  std::vector<std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw InvalidArgument("column \"" + name + "\" not present");
  }
  std::vector<double> values(const std::string& name) const {
    const auto c = column(name);
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    parts.push_back(cur);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.meta.push_back(line);
    } else if (t.columns.empty()) {
      t.columns = split(line);
    } else {
      std::vector<double> r;
      for (const auto& p : split(line)) r.push_back(std::strtod(p.c_str(), nullptr));
      if (r.size() != t.columns.size()) throw InvalidArgument("ragged CSV row in " + path.string());
      t.rows.push_back(std::move(r));
    }
  }
  if (t.columns.empty()) throw InvalidArgument("no header row in " + path.string());
  return t;
}

// Binary accumulator dump, little-endian host layout:
//   16-byte magic, u32 version, 32-byte config digest,
//   u64 n_times, u64 n_traj, u64 n_modes, u64 n_failed, u64 failed[n_failed],
//   f64 times[n_times], then per time: f64 shift[3], f64 sums[35], f64 aux[7].
inline constexpr char kDumpMagic[16] = {'T', 'N', 'T', '-', 'A', 'C', 'C', 'U', 'M', 'U', 'L', 'A', 'T', 'O', 'R', 'S'};
inline constexpr std::uint32_t kDumpVersion = 1;

struct AccumulatorDump {
  Digest config_digest{};
  std::vector<double> times;
  EnsembleSums sums;
};

namespace detail {
template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw InvalidArgument("accumulator dump is truncated");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}
}  // namespace detail

inline std::string serialize_dump(const AccumulatorDump& d) {
  if (d.times.size() != d.sums.per_time.size()) throw InvalidArgument("dump times do not match accumulators");
  std::string out(kDumpMagic, sizeof kDumpMagic);
  detail::put(out, kDumpVersion);
  out.append(reinterpret_cast<const char*>(d.config_digest.data()), d.config_digest.size());
  detail::put<std::uint64_t>(out, d.times.size());
  detail::put<std::uint64_t>(out, d.sums.n_traj);
  detail::put<std::uint64_t>(out, d.sums.n_modes);
  detail::put<std::uint64_t>(out, d.sums.failed_trajectories.size());
  for (auto f : d.sums.failed_trajectories) detail::put<std::uint64_t>(out, f);
  for (double t : d.times) detail::put(out, t);
  for (const auto& acc : d.sums.per_time) {
    for (double v : acc.shift()) detail::put(out, v);
    for (double v : acc.sums()) detail::put(out, v);
    for (double v : acc.aux()) detail::put(out, v);
  }
  return out;
}

inline AccumulatorDump deserialize_dump(std::string_view in) {
  if (in.size() < sizeof kDumpMagic || std::memcmp(in.data(), kDumpMagic, sizeof kDumpMagic) != 0) {
    throw InvalidArgument("not an accumulator dump (bad magic)");
  }
  in.remove_prefix(sizeof kDumpMagic);
  const auto version = detail::take<std::uint32_t>(in);
  if (version != kDumpVersion) {
    throw InvalidArgument("unsupported accumulator dump version " + std::to_string(version));
  }
  AccumulatorDump d;
  for (auto& b : d.config_digest) b = detail::take<unsigned char>(in);
  const auto n_times = detail::take<std::uint64_t>(in);
  d.sums.n_traj = detail::take<std::uint64_t>(in);
  d.sums.n_modes = detail::take<std::uint64_t>(in);
  const auto n_failed = detail::take<std::uint64_t>(in);
  if (n_failed > in.size() / 8) throw InvalidArgument("accumulator dump is truncated");
  for (std::uint64_t i = 0; i < n_failed; ++i) d.sums.failed_trajectories.push_back(detail::take<std::uint64_t>(in));
  const std::size_t per_time_bytes = 8 * (3 + TimeAccumulator::kMonomials + TimeAccumulator::kAux);
  if (n_times > in.size() / (8 + per_time_bytes)) throw InvalidArgument("accumulator dump is truncated");
  for (std::uint64_t i = 0; i < n_times; ++i) d.times.push_back(detail::take<double>(in));
  d.sums.per_time.resize(n_times);
  for (auto& acc : d.sums.per_time) {
    for (double& v : acc.shift()) v = detail::take<double>(in);
    for (double& v : acc.sums()) v = detail::take<double>(in);
    for (double& v : acc.aux()) v = detail::take<double>(in);
  }
  if (!in.empty()) throw InvalidArgument("trailing bytes after accumulator dump");
  return d;
}

inline void write_text(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace tnt::harness
