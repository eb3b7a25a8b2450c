#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "slicenormals/scan.hpp"

namespace slicenormals {

/// Angle-difference cutoff for splitting a slice into smooth components.
class ClusteringParams {
 public:
  static constexpr double kDefaultThresholdDeg = 30.0;

  ClusteringParams() : ClusteringParams(kDefaultThresholdDeg * std::numbers::pi / 180.0) {}

  explicit ClusteringParams(double alpha_threshold_rad)
      : alpha_threshold_(alpha_threshold_rad), cos_threshold_(std::cos(alpha_threshold_rad)) {
    if (!(alpha_threshold_rad > 0.0 && alpha_threshold_rad < std::numbers::pi)) {
      throw ContractError("alpha threshold must lie in (0, pi) radians, got " +
                          std::to_string(alpha_threshold_rad));
    }
  }

  static ClusteringParams from_degrees(double deg) {
    return ClusteringParams(deg * std::numbers::pi / 180.0);
  }

  double alpha_threshold() const { return alpha_threshold_; }
  double cos_threshold() const { return cos_threshold_; }

 private:
  double alpha_threshold_;
  double cos_threshold_;
};

/// Run-length encoded line labels. strengths[l] is the number of consecutive
/// line segments that carry label l.
struct RleComponents {
  std::vector<std::size_t> strengths;

  std::size_t line_count() const {
    return std::accumulate(strengths.begin(), strengths.end(), std::size_t{0});
  }
  std::size_t size() const { return strengths.size(); }

  friend bool operator==(const RleComponents&, const RleComponents&) = default;
};

/// One component label per slice entry; non-decreasing.
using PointLabels = std::vector<int>;

/// Unsigned angle between two non-zero vectors, in [0, pi].
inline double angle_between(const Vec3& v1, const Vec3& v2) {
  const double n1 = v1.norm();
  const double n2 = v2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw ContractError("angle_between needs non-zero vectors");
  const double c = std::clamp(v1.dot(v2) / (n1 * n2), -1.0, 1.0);
  return std::acos(c);
}

namespace detail {

// True when the turn between two consecutive segments is strictly larger than
// the threshold. Compares cosines and only evaluates the arccos when the
// cosine is within rounding distance of the threshold, so the outcome equals
// angle_between(v1, v2) > alpha_threshold.
inline bool turn_exceeds(const Vec3& v1, double n1, const Vec3& v2, double n2,
                         const ClusteringParams& params) {
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw ContractError("angle_between needs non-zero vectors");
  constexpr double kMargin = 1e-12;
  const double c = std::clamp(v1.dot(v2) / (n1 * n2), -1.0, 1.0);
  if (c < params.cos_threshold() - kMargin) return true;
  if (c > params.cos_threshold() + kMargin) return false;
  return std::acos(c) > params.alpha_threshold();
}

// EncodeLines over n >= 2 points given by `at(i)`; strengths are written to `out`.
template <typename PointAt>
void encode_lines_into(std::size_t n, PointAt&& at, const ClusteringParams& params,
                       std::vector<std::size_t>& out) {
  out.clear();
  Vec3 v_prev = at(1) - at(0);
  double n_prev = v_prev.norm();
  std::size_t strength = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 v_next = at(i + 1) - at(i);
    const double n_next = v_next.norm();
    if (turn_exceeds(v_prev, n_prev, v_next, n_next, params)) {
      out.push_back(strength);
      strength = 0;
    }
    ++strength;
    v_prev = v_next;
    n_prev = n_next;
  }
  out.push_back(strength);
}

// ExpandLabels; `labels` receives one label per point.
template <typename PointAt>
void expand_labels_into(PointAt&& at, const std::vector<std::size_t>& strengths,
                        std::vector<int>& labels) {
  labels.clear();
  labels.push_back(0);
  std::size_t prev_strength = 1;
  for (std::size_t l = 0; l < strengths.size(); ++l) {
    const std::size_t s = strengths[l];
    const std::size_t disputed = labels.size() - 1;
    if (s > 1 && prev_strength == 1) {
      labels[disputed] = static_cast<int>(l);
    } else if (s > 1 && prev_strength > 1) {
      const Vec3& p = at(disputed);
      if ((p - at(disputed + 1)).norm() < (p - at(disputed - 1)).norm()) {
        labels[disputed] = static_cast<int>(l);
      }
    }
    labels.insert(labels.end(), s, static_cast<int>(l));
    prev_strength = s;
  }
}

// Reusable buffers for labeling many slices without reallocating.
struct LabelWorkspace {
  std::vector<std::size_t> unique;  // positions of points that differ from their predecessor
  std::vector<std::size_t> strengths;
  std::vector<int> unique_labels;
};

// LabelPoints over n points given by `at(i)`; calls emit(i, label) for every i.
// Exact duplicates of the previous point are clustered once and share its label.
template <typename PointAt, typename Emit>
void label_points_with(std::size_t n, PointAt&& at, const ClusteringParams& params,
                       LabelWorkspace& ws, Emit&& emit) {
  if (n == 0) return;
  ws.unique.clear();
  ws.unique.push_back(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (at(i) != at(ws.unique.back())) ws.unique.push_back(i);
  }
  if (ws.unique.size() < 2) {
    for (std::size_t i = 0; i < n; ++i) emit(i, 0);
    return;
  }
  if (ws.unique.size() == n) {
    encode_lines_into(n, at, params, ws.strengths);
    expand_labels_into(at, ws.strengths, ws.unique_labels);
    for (std::size_t i = 0; i < n; ++i) emit(i, ws.unique_labels[i]);
    return;
  }
  auto unique_at = [&](std::size_t k) -> const Vec3& { return at(ws.unique[k]); };
  encode_lines_into(ws.unique.size(), unique_at, params, ws.strengths);
  expand_labels_into(unique_at, ws.strengths, ws.unique_labels);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k + 1 < ws.unique.size() && ws.unique[k + 1] == i) ++k;
    emit(i, ws.unique_labels[k]);
  }
}

}  // namespace detail

/// Walks consecutive line segments of the slice and starts a new component
/// whenever the turn between two segments exceeds the threshold.
inline RleComponents encode_lines(const Slice& slice, const ClusteringParams& params) {
  const std::size_t n = slice.size();
  if (n < 2) {
    throw ContractError("encode_lines needs at least 2 points, got " + std::to_string(n));
  }
  RleComponents rle;
  detail::encode_lines_into(
      n, [&](std::size_t i) -> const Vec3& { return slice.point(i); }, params, rle.strengths);
  return rle;
}

/// Spreads line labels onto points. The boundary ("disputed") point between two
/// components goes to a strong neighbor; between two strong components it goes
/// to the strictly closer one; between weak components it keeps the earlier label.
inline PointLabels expand_labels(const Slice& slice, const RleComponents& rle) {
  if (slice.size() < 2 || rle.line_count() + 1 != slice.size()) {
    throw ContractError("RLE covers " + std::to_string(rle.line_count()) + " lines but slice has " +
                        std::to_string(slice.size()) + " points");
  }
  for (auto s : rle.strengths) {
    if (s == 0) throw ContractError("RLE strengths must be positive");
  }
  PointLabels labels;
  labels.reserve(slice.size());
  detail::expand_labels_into([&](std::size_t i) -> const Vec3& { return slice.point(i); },
                             rle.strengths, labels);
  return labels;
}

/// Labels every point of a slice. Empty and singleton slices get all-zero labels;
/// exact duplicates of the preceding point are clustered once and share its label.
inline PointLabels label_points(const Slice& slice, const ClusteringParams& params) {
  PointLabels labels(slice.size(), 0);
  detail::LabelWorkspace ws;
  detail::label_points_with(
      slice.size(), [&](std::size_t i) -> const Vec3& { return slice.point(i); }, params, ws,
      [&](std::size_t i, int label) { labels[i] = label; });
  return labels;
}

/// Reference clustering: explicit chain graph over line segments with an edge
/// wherever the turn is within the threshold, then generic DFS components.
inline RleComponents dfs_reference_clustering(const Slice& slice, const ClusteringParams& params) {
  const std::size_t n = slice.size();
  if (n < 2) {
    throw ContractError("dfs_reference_clustering needs at least 2 points, got " +
                        std::to_string(n));
  }
  const std::size_t lines = n - 1;
  std::vector<Vec3> segment(lines);
  for (std::size_t i = 0; i < lines; ++i) segment[i] = slice.point(i + 1) - slice.point(i);

  std::vector<std::vector<std::size_t>> adjacency(lines);
  for (std::size_t i = 0; i + 1 < lines; ++i) {
    if (angle_between(segment[i], segment[i + 1]) <= params.alpha_threshold()) {
      adjacency[i].push_back(i + 1);
      adjacency[i + 1].push_back(i);
    }
  }

  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> component(lines, kUnvisited);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < lines; ++root) {
    if (component[root] != kUnvisited) continue;
    const std::size_t id = sizes.size();
    sizes.push_back(0);
    stack.push_back(root);
    component[root] = id;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      ++sizes[id];
      for (std::size_t next : adjacency[node]) {
        if (component[next] == kUnvisited) {
          component[next] = id;
          stack.push_back(next);
        }
      }
    }
  }

  // Components of a chain are contiguous, so visiting roots in order yields
  // them in line order.
  return RleComponents{std::move(sizes)};
}

}  // namespace slicenormals
