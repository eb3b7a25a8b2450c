#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slicenormals/io.hpp"
#include "slicenormals/scan.hpp"
#include "slicenormals/simulate.hpp"

namespace slicenormals {

/// Angle in degrees between two unit normals, ignoring their sign.
inline double angular_error(const Vec3& estimated, const Vec3& truth) {
  constexpr double kUnitTolerance = 1e-6;
  if (std::abs(estimated.norm() - 1.0) > kUnitTolerance || std::abs(truth.norm() - 1.0) > kUnitTolerance) {
    throw ContractError("angular_error expects unit vectors");
  }
  return std::acos(std::min(1.0, std::abs(estimated.dot(truth)))) * 180.0 / std::numbers::pi;
}

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

/// Robustness summary for one estimator against ground truth. Error statistics
/// cover cells that have both a Normal estimate and a ground-truth hit; they are
/// absent when there are none.
struct EvalReport {
  std::optional<ErrorStats> errors;
  std::optional<double> edge_mean;  // over crease cells
  double coverage = 0.0;            // Normal cells / ground-truth cells
  std::size_t ground_truth_cells = 0;
  std::size_t normal_count = 0;
  std::size_t high_curvature_count = 0;
  std::size_t invalid_count = 0;
  std::size_t edge_count = 0;
};

/// Percentile with linear interpolation between closest ranks; `sorted` must be non-empty.
inline double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline ErrorStats summarize(std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  return {sum / static_cast<double>(errors.size()), percentile(errors, 0.5), percentile(errors, 0.95)};
}

/// `cell_mask`, when given, restricts the evaluation to cells marked true.
inline EvalReport evaluate(const NormalField& normals, const GroundTruth& gt,
                           const std::vector<bool>* cell_mask = nullptr) {
  if (normals.rows() != gt.rows || normals.cols() != gt.cols) {
    throw ContractError("normal field and ground truth dimensions differ");
  }
  if (cell_mask != nullptr && cell_mask->size() != normals.size()) {
    throw ContractError("cell mask size differs from the normal field");
  }
  EvalReport report;
  std::vector<double> errors;
  double edge_sum = 0.0;
  for (std::size_t cell = 0; cell < normals.size(); ++cell) {
    const GroundTruthCell& truth = gt.cells[cell];
    if (!truth.hit || (cell_mask != nullptr && !(*cell_mask)[cell])) continue;
    ++report.ground_truth_cells;
    const NormalCell& est = normals[cell];
    switch (est.status) {
      case NormalStatus::HighCurvature:
        ++report.high_curvature_count;
        continue;
      case NormalStatus::Invalid:
        ++report.invalid_count;
        continue;
      case NormalStatus::Normal:
        ++report.normal_count;
        break;
    }
    const double err = angular_error(est.normal, truth.normal);
    errors.push_back(err);
    if (truth.crease) {
      edge_sum += err;
      ++report.edge_count;
    }
  }
  if (report.ground_truth_cells > 0) {
    report.coverage = static_cast<double>(report.normal_count) /
                      static_cast<double>(report.ground_truth_cells);
  }
  if (!errors.empty()) report.errors = summarize(std::move(errors));
  if (report.edge_count > 0) report.edge_mean = edge_sum / static_cast<double>(report.edge_count);
  return report;
}

/// Cells that sit inside one surface face: hit, not a crease, and all four grid
/// neighbors (columns wrap) hit the same face.
inline std::vector<bool> interior_mask(const GroundTruth& gt) {
  std::vector<bool> mask(gt.cells.size(), false);
  for (std::size_t row = 1; row + 1 < gt.rows; ++row) {
    for (std::size_t col = 0; col < gt.cols; ++col) {
      const auto& c = gt.at(row, col);
      if (!c.hit || c.crease) continue;
      const std::size_t left = col == 0 ? gt.cols - 1 : col - 1;
      const std::size_t right = col + 1 == gt.cols ? 0 : col + 1;
      bool inside = true;
      for (const auto* n : {&gt.at(row, left), &gt.at(row, right), &gt.at(row - 1, col),
                            &gt.at(row + 1, col)}) {
        inside = inside && n->hit && n->hit_id == c.hit_id && n->face == c.face;
      }
      mask[row * gt.cols + col] = inside;
    }
  }
  return mask;
}

/// key=value lines prefixed with the method name; absent statistics print "na".
inline void write_report_text(const std::string& method, const EvalReport& r, std::ostream& out) {
  auto num = [](std::optional<double> v) { return v ? detail::format_double(*v) : std::string("na"); };
  std::optional<ErrorStats> e = r.errors;
  out << method << ".mean_deg=" << num(e ? std::optional(e->mean) : std::nullopt) << '\n'
      << method << ".median_deg=" << num(e ? std::optional(e->median) : std::nullopt) << '\n'
      << method << ".p95_deg=" << num(e ? std::optional(e->p95) : std::nullopt) << '\n'
      << method << ".edge_mean_deg=" << num(r.edge_mean) << '\n'
      << method << ".coverage=" << detail::format_double(r.coverage) << '\n'
      << method << ".high_curvature=" << r.high_curvature_count << '\n'
      << method << ".invalid=" << r.invalid_count << '\n';
}

inline void write_report_csv_header(std::ostream& out) {
  out << "method,mean_deg,median_deg,p95_deg,edge_mean_deg,coverage,high_curvature,invalid\n";
}

inline void write_report_csv_row(const std::string& method, const EvalReport& r, std::ostream& out) {
  auto num = [](std::optional<double> v) { return v ? detail::format_double(*v) : std::string(); };
  const auto& e = r.errors;
  out << method << ',' << num(e ? std::optional(e->mean) : std::nullopt) << ','
      << num(e ? std::optional(e->median) : std::nullopt) << ','
      << num(e ? std::optional(e->p95) : std::nullopt) << ',' << num(r.edge_mean) << ','
      << detail::format_double(r.coverage) << ',' << r.high_curvature_count << ','
      << r.invalid_count << '\n';
}

}  // namespace slicenormals
