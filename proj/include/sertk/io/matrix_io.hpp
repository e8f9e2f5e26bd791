#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"
#include "sertk/matrix.hpp"

namespace sertk {

// EMAT: "EMAT" | rows:u32le | cols:u32le | rows*cols float32le, row-major.
inline constexpr std::string_view kEmatMagic = "EMAT";

inline Matrix decode_emat(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes, "emat");
  require(in.remaining() >= 4 && in.take_tag() == kEmatMagic, "emat: magic mismatch");
  const std::uint32_t rows = in.u32();
  const std::uint32_t cols = in.u32();
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  require(in.remaining() >= count * 4, "emat: truncated payload");
  Mat m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const float v = in.f32();
      require(std::isfinite(v), "emat: NaN/Inf cell at (" + std::to_string(r) + "," +
                                    std::to_string(c) + ")");
      m(r, c) = v;
    }
  }
  require(in.remaining() == 0, "emat: trailing bytes after payload");
  return Matrix(std::move(m));
}

inline std::vector<std::uint8_t> encode_emat(const Mat& m) {
  require(m.allFinite(), "emat: refusing to write non-finite values");
  ByteWriter out;
  out.tag(kEmatMagic);
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.f32(static_cast<float>(m(r, c)));
  return std::move(out).bytes();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  while (!out.empty() && trim(out.back()).empty()) out.pop_back();
  return out;
}

}  // namespace detail

// CSV with an optional header row. The first row is treated as a header
// when any of its cells fails to parse as a number.
inline Matrix parse_csv_matrix(std::string_view text) {
  const auto lines = detail::lines_of(text);
  std::vector<std::string> names;
  std::size_t first = 0;
  if (!lines.empty()) {
    bool numeric = true;
    double dummy;
    for (auto cell : detail::split(lines[0], ',')) numeric = numeric && detail::parse_double(cell, dummy);
    if (!numeric) {
      for (auto cell : detail::split(lines[0], ',')) names.emplace_back(detail::trim(cell));
      first = 1;
    }
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto cells = detail::split(lines[i], ',');
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto cell : cells) {
      double v;
      if (!detail::parse_double(cell, v))
        throw InputError("csv: non-numeric cell '" + std::string(detail::trim(cell)) +
                         "' on line " + std::to_string(i + 1));
      if (!std::isfinite(v))
        throw InputError("csv: NaN/Inf cell on line " + std::to_string(i + 1));
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("csv: ragged row on line " + std::to_string(i + 1));
    rows.push_back(std::move(row));
  }
  const std::size_t cols = rows.empty() ? names.size() : rows.front().size();
  require(names.empty() || names.size() == cols, "csv: header width differs from data width");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  return Matrix(std::move(m), std::move(names));
}

inline std::string format_csv_matrix(const Matrix& m) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  if (!m.column_names.empty()) {
    for (std::size_t c = 0; c < m.column_names.size(); ++c)
      out << (c ? "," : "") << m.column_names[c];
    out << '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m.values(r, c);
    out << '\n';
  }
  return out.str();
}

// Reads EMAT when the file starts with the magic bytes, CSV otherwise.
inline Matrix read_matrix(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const bool is_emat = bytes.size() >= 4 && std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) == kEmatMagic;
  if (is_emat || path.extension() == ".emat") return decode_emat(bytes);
  return parse_csv_matrix(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline void write_matrix_emat(const std::filesystem::path& path, const Mat& m) {
  write_file_atomic(path, encode_emat(m));
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  write_file_atomic(path, format_csv_matrix(m));
}

// Picks the format from the extension: ".emat" is binary, anything else CSV.
inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (path.extension() == ".emat")
    write_matrix_emat(path, m.values);
  else
    write_matrix_csv(path, m);
}

}  // namespace sertk
