#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "slicenormals/scan.hpp"

namespace slicenormals {

/// Malformed Organized Scan Format input. offset() is the byte position of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format double");
  return std::string(buf.data(), end);
}

inline void check_stream(const std::ostream& out) {
  if (!out) throw std::runtime_error("write to output stream failed");
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ >= text_.size(); }

  // Returns the next line without its terminator; `start` receives its byte offset.
  std::string_view next_line(std::size_t& start) {
    start = pos_;
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) {
      throw ParseError(pos_, "missing line terminator");
    }
    std::string_view line = text_.substr(pos_, nl - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl + 1;
    return line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

// Splits on single ASCII spaces; consecutive separators are a format error.
template <std::size_t N>
std::array<std::string_view, N> split_fields(std::string_view line, std::size_t line_start,
                                             const char* what) {
  std::array<std::string_view, N> fields{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto sp = line.find(' ', pos);
    bool last = i + 1 == N;
    if (last != (sp == std::string_view::npos)) {
      throw ParseError(line_start + pos, std::string("expected ") + std::to_string(N) +
                                             " space-separated fields in " + what);
    }
    fields[i] = line.substr(pos, last ? std::string_view::npos : sp - pos);
    if (fields[i].empty()) throw ParseError(line_start + pos, std::string("empty field in ") + what);
    pos = sp + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t offset, const char* what) {
  T value{};
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw ParseError(offset, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

/// Writes the scan in Organized Scan Format:
///   OSF1
///   <rows> <cols>
///   <valid> <x> <y> <z>     (rows*cols lines, row-major; invalid cells are "0 0 0 0")
inline void write_scan(const OrganizedScan& scan, std::ostream& out) {
  out << "OSF1\n" << scan.rows() << ' ' << scan.cols() << '\n';
  std::string line;
  for (std::size_t cell = 0; cell < scan.size(); ++cell) {
    if (!scan.valid(cell)) {
      out << "0 0 0 0\n";
      continue;
    }
    const Vec3& p = scan.point(cell);
    line = "1 ";
    line += detail::format_double(p.x());
    line += ' ';
    line += detail::format_double(p.y());
    line += ' ';
    line += detail::format_double(p.z());
    line += '\n';
    out << line;
  }
  detail::check_stream(out);
}

inline OrganizedScan parse_scan(std::string_view text) {
  detail::LineCursor cursor(text);
  std::size_t start = 0;
  if (cursor.at_end()) throw ParseError(0, "empty input");
  if (cursor.next_line(start) != "OSF1") throw ParseError(start, "expected magic 'OSF1'");

  if (cursor.at_end()) throw ParseError(cursor.offset(), "missing dimensions line");
  auto dims_line = cursor.next_line(start);
  auto dims = detail::split_fields<2>(dims_line, start, "dimensions line");
  auto rows = detail::parse_number<std::size_t>(dims[0], start, "row count");
  auto cols = detail::parse_number<std::size_t>(dims[1], start + dims[0].size() + 1, "column count");
  if (rows < 2 || cols < 1) throw ParseError(start, "scan needs rows >= 2 and cols >= 1");

  OrganizedScan scan(rows, cols);
  for (std::size_t cell = 0; cell < rows * cols; ++cell) {
    if (cursor.at_end()) {
      throw ParseError(cursor.offset(), "truncated payload: record " + std::to_string(cell) +
                                            " of " + std::to_string(rows * cols) + " missing");
    }
    auto line = cursor.next_line(start);
    auto f = detail::split_fields<4>(line, start, "point record");
    std::size_t off = start;
    std::array<std::size_t, 4> offsets{};
    for (std::size_t i = 0; i < 4; ++i) {
      offsets[i] = off;
      off += f[i].size() + 1;
    }
    if (f[0] != "0" && f[0] != "1") throw ParseError(offsets[0], "validity flag must be 0 or 1");
    Vec3 p;
    for (int i = 0; i < 3; ++i) p[i] = detail::parse_number<double>(f[i + 1], offsets[i + 1], "coordinate");
    std::size_t row = cell / cols;
    std::size_t col = cell % cols;
    if (f[0] == "0") {
      if (!p.isZero(0.0)) throw ParseError(start, "invalid cell must carry '0 0 0 0'");
      continue;
    }
    if (!p.allFinite()) throw ParseError(start, "non-finite coordinate in valid record");
    if (p.norm() <= 0.0) throw ParseError(start, "valid record at the sensor origin");
    scan.set_point(row, col, p);
  }
  if (!cursor.at_end()) throw ParseError(cursor.offset(), "trailing data after last record");
  return scan;
}

inline OrganizedScan read_scan(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw std::runtime_error("read from input stream failed");
  return parse_scan(text);
}

/// Byte color for one normal component: floor((n * 0.5 + 0.5) * 255) clamped to [0, 255].
inline int normal_to_color(double component) {
  double v = std::floor((component * 0.5 + 0.5) * 255.0);
  return static_cast<int>(std::clamp(v, 0.0, 255.0));
}

/// ASCII PLY with one vertex per Normal-status cell, colored by its normal.
inline void export_ply(const OrganizedScan& scan, const NormalField& normals, std::ostream& out) {
  if (!normals.conforms_to(scan)) {
    throw ContractError("normal field is " + std::to_string(normals.rows()) + "x" +
                        std::to_string(normals.cols()) + " but scan is " +
                        std::to_string(scan.rows()) + "x" + std::to_string(scan.cols()));
  }
  out << "ply\n"
      << "format ascii 1.0\n"
      << "element vertex " << normals.count(NormalStatus::Normal) << '\n'
      << "property double x\n"
      << "property double y\n"
      << "property double z\n"
      << "property double nx\n"
      << "property double ny\n"
      << "property double nz\n"
      << "property uchar red\n"
      << "property uchar green\n"
      << "property uchar blue\n"
      << "end_header\n";
  for (std::size_t cell = 0; cell < scan.size(); ++cell) {
    const NormalCell& c = normals[cell];
    if (c.status != NormalStatus::Normal) continue;
    const Vec3& p = scan.point(cell);
    const Vec3& n = c.normal;
    out << detail::format_double(p.x()) << ' ' << detail::format_double(p.y()) << ' '
        << detail::format_double(p.z()) << ' ' << detail::format_double(n.x()) << ' '
        << detail::format_double(n.y()) << ' ' << detail::format_double(n.z()) << ' '
        << normal_to_color(n.x()) << ' ' << normal_to_color(n.y()) << ' '
        << normal_to_color(n.z()) << '\n';
  }
  detail::check_stream(out);
}

/// Per-cell CSV: row,col,status,nx,ny,nz (zeros when no normal).
inline void write_normals_csv(const NormalField& normals, std::ostream& out) {
  out << "row,col,status,nx,ny,nz\n";
  for (std::size_t row = 0; row < normals.rows(); ++row) {
    for (std::size_t col = 0; col < normals.cols(); ++col) {
      const NormalCell& c = normals.at(row, col);
      Vec3 n = c.status == NormalStatus::Normal ? c.normal : Vec3::Zero();
      out << row << ',' << col << ',' << to_string(c.status) << ',' << detail::format_double(n.x())
          << ',' << detail::format_double(n.y()) << ',' << detail::format_double(n.z()) << '\n';
    }
  }
  detail::check_stream(out);
}

}  // namespace slicenormals
