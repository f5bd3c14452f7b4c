#pragma once

// Path and table persistence: `t,value` CSV, the compact binary path record
// (magic "HPL1", little-endian u32 horizon, u64 seed, u8 method, then the
// f64 values), matrix CSV export, and atomic file replacement via a
// temporary sibling plus rename.

#include <Eigen/Dense>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/path.hpp"

namespace hpl {

inline constexpr std::array<char, 4> kPathMagic = {'H', 'P', 'L', '1'};

/// Writes text to the target path atomically: the content lands in a
/// sibling temporary file which is then renamed over the target, so readers
/// never observe a half-written file.
inline void atomic_write_text(const std::filesystem::path& target,
                              const std::string& content) {
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush())
      throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec)
    throw io_error("rename failed: " + tmp.string() + " -> " + target.string() +
                   " (" + ec.message() + ")");
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

/// CSV export with header `t,value`, t = 1..T.
inline void write_path_csv(const SamplePath& path,
                           const std::filesystem::path& file) {
  std::string content = "t,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    content += std::to_string(i + 1);
    content += ',';
    content += format_double(path.values[i]);
    content += '\n';
  }
  atomic_write_text(file, content);
}

/// Reads a `t,value` CSV (header optional); only the value column is used.
inline SamplePath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot open: " + file.string());
  SamplePath path;
  path.method = GenMethod::kExternal;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string value_part =
        comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      path.values.push_back(std::stod(value_part));
    } catch (const std::exception&) {
      if (path.values.empty()) continue;  // header row
      throw io_error("unparseable row in " + file.string() + ": " + line);
    }
  }
  if (path.values.empty())
    throw io_error("no data rows in " + file.string());
  return path;
}

/// Compact binary record (see header comment). Assumes a little-endian host.
inline void write_path_binary(const SamplePath& path,
                              const std::filesystem::path& file) {
  if (path.values.size() > std::numeric_limits<std::uint32_t>::max())
    throw size_error("binary path: horizon exceeds u32");
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + tmp.string());
    out.write(kPathMagic.data(), kPathMagic.size());
    const auto t = static_cast<std::uint32_t>(path.values.size());
    out.write(reinterpret_cast<const char*>(&t), sizeof(t));
    out.write(reinterpret_cast<const char*>(&path.seed), sizeof(path.seed));
    const auto method = static_cast<std::uint8_t>(path.method);
    out.write(reinterpret_cast<const char*>(&method), sizeof(method));
    out.write(reinterpret_cast<const char*>(path.values.data()),
              static_cast<std::streamsize>(path.values.size() * sizeof(double)));
    if (!out.flush()) throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec)
    throw io_error("rename failed: " + tmp.string() + " (" + ec.message() + ")");
}

inline SamplePath read_path_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw io_error("cannot open: " + file.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kPathMagic)
    throw io_error("bad magic in " + file.string());
  std::uint32_t t = 0;
  std::uint64_t seed = 0;
  std::uint8_t method = 0;
  in.read(reinterpret_cast<char*>(&t), sizeof(t));
  in.read(reinterpret_cast<char*>(&seed), sizeof(seed));
  in.read(reinterpret_cast<char*>(&method), sizeof(method));
  if (!in || method > 2) throw io_error("corrupt header in " + file.string());
  SamplePath path;
  path.seed = seed;
  path.method = static_cast<GenMethod>(method);
  path.values.resize(t);
  in.read(reinterpret_cast<char*>(path.values.data()),
          static_cast<std::streamsize>(sizeof(double) * t));
  if (!in) throw io_error("truncated values in " + file.string());
  return path;
}

/// Matrix CSV with an optional comma-joined header line.
inline void write_matrix_csv(const Eigen::MatrixXd& m,
                             const std::filesystem::path& file,
                             const std::string& header = {}) {
  std::string content;
  if (!header.empty()) {
    content += header;
    content += '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) content += ',';
      content += format_double(m(i, j));
    }
    content += '\n';
  }
  atomic_write_text(file, content);
}

/// Numeric matrix from CSV; a single leading non-numeric line is treated as
/// a header. All data rows must have the same width.
inline Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot open: " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool bad = false;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(cell[used])) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        bad = true;
        break;
      }
    }
    if (bad || row.empty()) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw io_error("unparseable row in " + file.string() + ": " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw io_error("ragged rows in " + file.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error("no data rows in " + file.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return m;
}

}  // namespace hpl
