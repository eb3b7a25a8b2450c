#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slicenormals/clustering.hpp"
#include "slicenormals/normals.hpp"
#include "slicenormals/scan.hpp"

namespace slicenormals {

struct TimingStats {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;  // sample standard deviation
  std::size_t repetitions = 0;
};

/// Runs `fn` warmup times untimed, then `repetitions` times on a monotonic clock.
template <typename Fn>
TimingStats time_repeated(Fn&& fn, std::size_t repetitions, std::size_t warmup) {
  if (repetitions < 2) throw ContractError("need at least 2 timed repetitions");
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  TimingStats stats;
  stats.repetitions = repetitions;
  for (double s : samples) stats.mean_ms += s;
  stats.mean_ms /= static_cast<double>(repetitions);
  double sq = 0.0;
  for (double s : samples) sq += (s - stats.mean_ms) * (s - stats.mean_ms);
  stats.stddev_ms = std::sqrt(sq / static_cast<double>(repetitions - 1));
  return stats;
}

struct NormalsBenchmark {
  TimingStats baseline;
  TimingStats labeled;
  std::size_t valid_points = 0;

  double ratio() const { return labeled.mean_ms / baseline.mean_ms; }
};

/// Single-threaded timing of both estimators on one scan. The labeled timing
/// includes clustering every column.
inline NormalsBenchmark benchmark_normals(const OrganizedScan& scan, const ClusteringParams& params,
                                          std::size_t repetitions, std::size_t warmup) {
  std::size_t sink = 0;
  NormalsBenchmark result;
  result.valid_points = scan.valid_count();
  result.baseline = time_repeated(
      [&] { sink += normals_baseline(scan).count(NormalStatus::Normal); }, repetitions, warmup);
  result.labeled = time_repeated(
      [&] { sink += normals_labeled(scan, params).count(NormalStatus::Normal); }, repetitions, warmup);
  // keeps the estimator calls observable
  if (sink == static_cast<std::size_t>(-1)) result.valid_points = 0;
  return result;
}

}  // namespace slicenormals
