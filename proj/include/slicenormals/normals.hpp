#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicenormals/clustering.hpp"
#include "slicenormals/scan.hpp"

namespace slicenormals {

namespace detail {

// Difference vector across a point along one grid direction. A missing
// neighbor is replaced by the point itself; with both missing there is none.
inline bool span_between(const Vec3* before, const Vec3* after, const Vec3& p, Vec3& out) {
  if (before == nullptr && after == nullptr) return false;
  out = (after ? *after : p) - (before ? *before : p);
  return true;
}

// Shared cross-product kernel. `admit(cell, neighbor_cell)` decides whether a
// valid vertical neighbor may be used; horizontal neighbors are always used.
template <typename VerticalAdmit>
NormalField estimate_normals(const OrganizedScan& scan, VerticalAdmit&& admit) {
  const std::size_t rows = scan.rows();
  const std::size_t cols = scan.cols();
  NormalField field(rows, cols);
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t col = 0; col < cols; ++col) {
      const std::size_t cell = scan.index(row, col);
      if (!scan.valid(cell)) continue;
      const Vec3& p = scan.point(cell);

      const Vec3* bottom = nullptr;
      const Vec3* top = nullptr;
      bool bottom_exists = false;
      bool top_exists = false;
      if (row > 0 && scan.valid(cell - cols)) {
        bottom_exists = true;
        if (admit(cell, cell - cols)) bottom = &scan.point(cell - cols);
      }
      if (row + 1 < rows && scan.valid(cell + cols)) {
        top_exists = true;
        if (admit(cell, cell + cols)) top = &scan.point(cell + cols);
      }
      if (bottom_exists && top_exists && bottom == nullptr && top == nullptr) {
        field[cell].status = NormalStatus::HighCurvature;
        continue;
      }

      const std::size_t left_col = col == 0 ? cols - 1 : col - 1;
      const std::size_t right_col = col + 1 == cols ? 0 : col + 1;
      const std::size_t left_cell = scan.index(row, left_col);
      const std::size_t right_cell = scan.index(row, right_col);
      const Vec3* left = left_col != col && scan.valid(left_cell) ? &scan.point(left_cell) : nullptr;
      const Vec3* right =
          right_col != col && scan.valid(right_cell) ? &scan.point(right_cell) : nullptr;

      Vec3 horizontal;
      Vec3 vertical;
      if (!span_between(left, right, p, horizontal) || !span_between(bottom, top, p, vertical)) {
        continue;
      }
      Vec3 n = horizontal.cross(vertical);
      const double length = n.norm();
      if (!(length > 0.0) || !std::isfinite(length)) continue;
      n /= length;
      if (n.dot(p) > 0.0) n = -n;
      field[cell].status = NormalStatus::Normal;
      field[cell].normal = n;
    }
  }
  return field;
}

}  // namespace detail

/// Cross product of the horizontal and vertical neighbor spans at every valid
/// cell, normalized and oriented toward the sensor at the origin.
inline NormalField normals_baseline(const OrganizedScan& scan) {
  return detail::estimate_normals(scan, [](std::size_t, std::size_t) { return true; });
}

/// Per-column component labels laid out like the scan; -1 on cells without a return.
inline std::vector<int> label_scan(const OrganizedScan& scan, const ClusteringParams& params) {
  // Columns are gathered in small blocks so the row-major grid is read one
  // cache line at a time instead of with a full-row stride per point.
  constexpr std::size_t kBlock = 8;
  const std::size_t rows = scan.rows();
  const std::size_t cols = scan.cols();
  std::vector<int> labels(scan.size(), -1);
  std::vector<std::size_t> cells(kBlock * rows);
  std::vector<Vec3> points(kBlock * rows);
  std::size_t counts[kBlock];
  detail::LabelWorkspace ws;
  for (std::size_t first = 0; first < cols; first += kBlock) {
    const std::size_t width = std::min(kBlock, cols - first);
    std::fill(counts, counts + width, std::size_t{0});
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t base = scan.index(row, first);
      for (std::size_t j = 0; j < width; ++j) {
        if (!scan.valid(base + j)) continue;
        const std::size_t slot = j * rows + counts[j]++;
        cells[slot] = base + j;
        points[slot] = scan.point(base + j);
      }
    }
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t offset = j * rows;
      detail::label_points_with(
          counts[j], [&](std::size_t i) -> const Vec3& { return points[offset + i]; }, params, ws,
          [&](std::size_t i, int label) { labels[cells[offset + i]] = label; });
    }
  }
  return labels;
}

/// Same as the baseline, except a vertical neighbor from a different slice
/// component counts as missing. A point whose two vertical neighbors both lie
/// in other components is HighCurvature.
inline NormalField normals_labeled(const OrganizedScan& scan, const ClusteringParams& params) {
  const std::vector<int> labels = label_scan(scan, params);
  return detail::estimate_normals(scan, [&labels](std::size_t cell, std::size_t neighbor) {
    return labels[cell] == labels[neighbor];
  });
}

class NormalMethod {
 public:
  enum class Variant { Baseline, LabelRestricted };

  static NormalMethod baseline() { return NormalMethod(Variant::Baseline, std::nullopt); }
  static NormalMethod label_restricted(ClusteringParams params) {
    return NormalMethod(Variant::LabelRestricted, params);
  }

  /// Accepts "baseline" or "labeled".
  static NormalMethod parse(std::string_view name, ClusteringParams params) {
    if (name == "baseline") return baseline();
    if (name == "labeled") return label_restricted(params);
    throw ContractError("unknown normal method '" + std::string(name) +
                        "' (expected baseline or labeled)");
  }

  Variant variant() const { return variant_; }
  const std::optional<ClusteringParams>& params() const { return params_; }
  std::string_view name() const { return variant_ == Variant::Baseline ? "baseline" : "labeled"; }

  NormalField estimate(const OrganizedScan& scan) const {
    if (variant_ == Variant::Baseline) return normals_baseline(scan);
    return normals_labeled(scan, *params_);
  }

 private:
  NormalMethod(Variant variant, std::optional<ClusteringParams> params)
      : variant_(variant), params_(params) {}

  Variant variant_;
  std::optional<ClusteringParams> params_;
};

struct SliceNormal {
  std::size_t row = 0;
  std::optional<Vec3> normal;
};

/// In-slice normals for plotting a single firing column. The tangent spans the
/// same-label slice neighbors (the point stands in for an unusable one); the
/// normal is the part of the viewing ray orthogonal to that tangent, pointing
/// back at the sensor.
inline std::vector<SliceNormal> slice_normals_2d(const Slice& slice, const ClusteringParams& params) {
  const PointLabels labels = label_points(slice, params);
  std::vector<SliceNormal> out(slice.size());
  for (std::size_t i = 0; i < slice.size(); ++i) {
    out[i].row = slice.entries[i].row;
    const Vec3& p = slice.point(i);
    const Vec3* prev = i > 0 && labels[i - 1] == labels[i] ? &slice.point(i - 1) : nullptr;
    const Vec3* next =
        i + 1 < slice.size() && labels[i + 1] == labels[i] ? &slice.point(i + 1) : nullptr;
    Vec3 tangent;
    if (!detail::span_between(prev, next, p, tangent)) continue;
    const double t_len = tangent.norm();
    if (!(t_len > 0.0)) continue;
    tangent /= t_len;
    Vec3 n = -(p - p.dot(tangent) * tangent);
    const double n_len = n.norm();
    if (!(n_len > 0.0) || !std::isfinite(n_len)) continue;
    out[i].normal = n / n_len;
  }
  return out;
}

}  // namespace slicenormals
