#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace slicenormals {

using Vec3 = Eigen::Vector3d;

/// Thrown when a caller violates a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Organized LiDAR scan. Row r is beam r counted bottom-to-top by elevation,
/// column c is the c-th azimuth firing. Storage is row-major.
class OrganizedScan {
 public:
  OrganizedScan(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), points_(rows * cols, Vec3::Zero()), valid_(rows * cols, 0) {
    if (rows < 2 || cols < 1) {
      throw ContractError("OrganizedScan needs rows >= 2 and cols >= 1, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }

  std::size_t index(std::size_t row, std::size_t col) const { return row * cols_ + col; }

  bool valid(std::size_t row, std::size_t col) const { return valid_[index(row, col)] != 0; }
  bool valid(std::size_t cell) const { return valid_[cell] != 0; }
  const Vec3& point(std::size_t row, std::size_t col) const { return points_[index(row, col)]; }
  const Vec3& point(std::size_t cell) const { return points_[cell]; }

  /// Stores a return. The point must be finite and away from the sensor origin.
  void set_point(std::size_t row, std::size_t col, const Vec3& p) {
    check_cell(row, col);
    if (!p.allFinite() || p.norm() <= 0.0) {
      throw ContractError("valid point must be finite with positive range");
    }
    points_[index(row, col)] = p;
    valid_[index(row, col)] = 1;
  }

  void clear_point(std::size_t row, std::size_t col) {
    check_cell(row, col);
    points_[index(row, col)] = Vec3::Zero();
    valid_[index(row, col)] = 0;
  }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
  }

  friend bool operator==(const OrganizedScan& a, const OrganizedScan& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.valid_ == b.valid_ &&
           a.points_ == b.points_;
  }

 private:
  void check_cell(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) {
      throw std::out_of_range("cell (" + std::to_string(row) + ", " + std::to_string(col) +
                              ") outside " + std::to_string(rows_) + "x" +
                              std::to_string(cols_) + " scan");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Vec3> points_;
  std::vector<std::uint8_t> valid_;
};

struct SliceEntry {
  std::size_t row;
  Vec3 point;
};

/// Valid points of one vertical firing, ascending by row.
struct Slice {
  std::size_t column = 0;
  std::vector<SliceEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  const Vec3& point(std::size_t i) const { return entries[i].point; }
};

inline Slice extract_slice(const OrganizedScan& scan, std::size_t column) {
  if (column >= scan.cols()) {
    throw std::out_of_range("column " + std::to_string(column) + " outside scan with " +
                            std::to_string(scan.cols()) + " columns");
  }
  Slice slice;
  slice.column = column;
  for (std::size_t row = 0; row < scan.rows(); ++row) {
    if (scan.valid(row, column)) slice.entries.push_back({row, scan.point(row, column)});
  }
  return slice;
}

enum class NormalStatus : std::uint8_t { Invalid = 0, Normal = 1, HighCurvature = 2 };

inline const char* to_string(NormalStatus s) {
  switch (s) {
    case NormalStatus::Normal:
      return "normal";
    case NormalStatus::HighCurvature:
      return "high_curvature";
    case NormalStatus::Invalid:
      return "invalid";
  }
  return "invalid";
}

struct NormalCell {
  NormalStatus status = NormalStatus::Invalid;
  Vec3 normal = Vec3::Zero();  // meaningful only when status == Normal

  std::optional<Vec3> get() const {
    if (status == NormalStatus::Normal) return normal;
    return std::nullopt;
  }

  friend bool operator==(const NormalCell& a, const NormalCell& b) {
    if (a.status != b.status) return false;
    return a.status != NormalStatus::Normal || a.normal == b.normal;
  }
};

/// Per-cell normal estimates laid out like the scan they came from.
class NormalField {
 public:
  NormalField(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }

  const NormalCell& at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  const NormalCell& operator[](std::size_t cell) const { return cells_[cell]; }
  NormalCell& operator[](std::size_t cell) { return cells_[cell]; }

  bool conforms_to(const OrganizedScan& scan) const {
    return rows_ == scan.rows() && cols_ == scan.cols();
  }

  std::size_t count(NormalStatus status) const {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.status == status;
    return n;
  }

  friend bool operator==(const NormalField& a, const NormalField& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<NormalCell> cells_;
};

}  // namespace slicenormals
