#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "slicenormals/clustering.hpp"
#include "test_support.hpp"

namespace slicenormals {
namespace {

using testing::make_slice;
using testing::random_slice;

constexpr double kPi = std::numbers::pi;
const ClusteringParams k30deg(0.52);

// Polyline whose per-segment turns are 0 or 90 degrees so that its line labels
// are {0,0,0,0,1,2,2,2,3,4,5,5,5}. Turn angles were checked independently
// with numpy: breaks after segments 3, 4, 7, 8 and 9.
Slice zigzag_slice() {
  const int line_labels[] = {0, 0, 0, 0, 1, 2, 2, 2, 3, 4, 5, 5, 5};
  std::vector<Vec3> pts{Vec3::Zero()};
  for (int l : line_labels) pts.push_back(pts.back() + (l % 2 == 0 ? Vec3::UnitZ() : Vec3::UnitY()));
  return make_slice(pts);
}

Slice l_shape() {
  return make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 2}, {0, 2, 2}});
}

TEST(AngleBetweenTest, Basics) {
  EXPECT_DOUBLE_EQ(angle_between({1, 0, 0}, {1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(angle_between({1, 0, 0}, {0, 1, 0}), kPi / 2);
  EXPECT_DOUBLE_EQ(angle_between({1, 0, 0}, {-1, 0, 0}), kPi);
  EXPECT_DOUBLE_EQ(angle_between({2, 0, 0}, {3, 0, 0}), 0.0);
  // cosine overshoot is clamped
  Vec3 v(0.1, 0.7, 0.3);
  EXPECT_FALSE(std::isnan(angle_between(v, 3.0 * v)));
  EXPECT_THROW(angle_between(Vec3::Zero(), {1, 0, 0}), ContractError);
}

TEST(ClusteringParamsTest, Range) {
  EXPECT_THROW(ClusteringParams(0.0), ContractError);
  EXPECT_THROW(ClusteringParams{kPi}, ContractError);
  EXPECT_NEAR(ClusteringParams().alpha_threshold(), kPi / 6, 1e-15);
}

TEST(EncodeLinesTest, CollinearIsOneRun) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4}});
  EXPECT_EQ(encode_lines(s, k30deg).strengths, (std::vector<std::size_t>{4}));
}

TEST(EncodeLinesTest, LShapeBreaksOnce) {
  EXPECT_EQ(encode_lines(l_shape(), k30deg).strengths, (std::vector<std::size_t>{2, 2}));
}

TEST(EncodeLinesTest, PublishedRleExample) {
  EXPECT_EQ(encode_lines(zigzag_slice(), k30deg).strengths,
            (std::vector<std::size_t>{4, 1, 3, 1, 1, 3}));
}

TEST(EncodeLinesTest, StrictThreshold) {
  // turn of exactly the threshold does not break
  const double turn = 0.5;
  Slice s = make_slice({{0, 0, 0}, {1, 0, 0}, {1 + std::cos(turn), std::sin(turn), 0}});
  const double measured = angle_between(s.point(1) - s.point(0), s.point(2) - s.point(1));
  EXPECT_EQ(encode_lines(s, ClusteringParams(measured)).strengths, (std::vector<std::size_t>{2}));
  EXPECT_EQ(encode_lines(s, ClusteringParams(std::nextafter(measured, 0.0))).strengths,
            (std::vector<std::size_t>{1, 1}));
}

TEST(EncodeLinesTest, NeedsTwoPoints) {
  EXPECT_THROW(encode_lines(make_slice({{1, 0, 0}}), k30deg), ContractError);
  EXPECT_THROW(dfs_reference_clustering(make_slice({}), k30deg), ContractError);
}

// Hand traces of the expansion procedure. Notation: labels after each component.
//   [2] on 3 points:   {0} -> s=2, prev=1: relabel p0 := 0, append 0,0 -> [0,0,0]
TEST(ExpandLabelsTest, SingleComponent) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}});
  EXPECT_EQ(expand_labels(s, {{2}}), (PointLabels{0, 0, 0}));
}

//   [2,1,2] on 6 points:
//     l=0 s=2 prev=1: relabel p0 := 0, append 0,0      -> [0,0,0]
//     l=1 s=1:        no relabel, append 1             -> [0,0,0,1]
//     l=2 s=2 prev=1: relabel p3 := 2, append 2,2      -> [0,0,0,2,2,2]
TEST(ExpandLabelsTest, WeakMiddleComponentAbsorbsNothing) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 2}, {0, 1, 3}, {0, 1, 4}});
  EXPECT_EQ(expand_labels(s, {{2, 1, 2}}), (PointLabels{0, 0, 0, 2, 2, 2}));
}

//   [3,2] on 6 points:
//     l=0 s=3 prev=1: append 0,0,0                     -> [0,0,0,0]
//     l=1 s=2 prev=3: disputed p3 goes to 1 iff |p3-p4| < |p3-p2|
TEST(ExpandLabelsTest, StrongStrongTieBreak) {
  Slice closer_next =
      make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0.5, 3}, {0, 1, 3}});
  EXPECT_EQ(expand_labels(closer_next, {{3, 2}}), (PointLabels{0, 0, 0, 1, 1, 1}));

  Slice closer_prev = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 2, 3}, {0, 4, 3}});
  EXPECT_EQ(expand_labels(closer_prev, {{3, 2}}), (PointLabels{0, 0, 0, 0, 1, 1}));

  // equal distances keep the earlier label
  Slice tie = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 1, 3}, {0, 2, 3}});
  EXPECT_EQ(expand_labels(tie, {{3, 2}}), (PointLabels{0, 0, 0, 0, 1, 1}));
}

//   [1,1,1] on 4 points: nothing is strong, so each disputed point keeps its
//   earlier label -> [0,0,1,2]
TEST(ExpandLabelsTest, WeakComponentsKeepEarlierLabel) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 2}});
  EXPECT_EQ(expand_labels(s, {{1, 1, 1}}), (PointLabels{0, 0, 1, 2}));
}

TEST(ExpandLabelsTest, RejectsInconsistentRle) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}});
  EXPECT_THROW(expand_labels(s, {{3}}), ContractError);
  EXPECT_THROW(expand_labels(s, {{2, 0}}), ContractError);
}

TEST(LabelPointsTest, DegenerateSlices) {
  EXPECT_TRUE(label_points(make_slice({}), k30deg).empty());
  EXPECT_EQ(label_points(make_slice({{1, 2, 3}}), k30deg), (PointLabels{0}));
}

TEST(LabelPointsTest, LShape) {
  EXPECT_EQ(label_points(l_shape(), k30deg), (PointLabels{0, 0, 0, 1, 1}));
}

TEST(LabelPointsTest, CoincidentPointsShareLabel) {
  Slice s = make_slice({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 2}, {0, 1, 2}, {0, 2, 2}, {0, 2, 2}});
  EXPECT_EQ(label_points(s, k30deg), (PointLabels{0, 0, 0, 0, 1, 1, 1}));
  Slice all_same = make_slice({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  EXPECT_EQ(label_points(all_same, k30deg), (PointLabels{0, 0, 0}));
}

TEST(DfsReferenceTest, Fixtures) {
  for (const Slice& s : {zigzag_slice(), l_shape()}) {
    EXPECT_EQ(dfs_reference_clustering(s, k30deg), encode_lines(s, k30deg));
  }
  Slice line = make_slice({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
  EXPECT_EQ(dfs_reference_clustering(line, k30deg).strengths, (std::vector<std::size_t>{3}));
}

TEST(ClusteringPropertyTest, MatchesDfsReference) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> threshold(0.01, kPi - 0.01);
  for (int trial = 0; trial < 1000; ++trial) {
    Slice s = random_slice(rng);
    ClusteringParams params(threshold(rng));
    RleComponents rle = encode_lines(s, params);
    ASSERT_EQ(rle, dfs_reference_clustering(s, params)) << "trial " << trial;
    ASSERT_EQ(rle.line_count() + 1, s.size());
  }
}

TEST(ClusteringPropertyTest, LabelInvariants) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    Slice s = random_slice(rng);
    RleComponents rle = encode_lines(s, ClusteringParams());
    PointLabels labels = expand_labels(s, rle);
    ASSERT_EQ(labels.size(), s.size());
    ASSERT_EQ(labels.front(), 0);
    for (std::size_t i = 1; i < labels.size(); ++i) ASSERT_LE(labels[i - 1], labels[i]);
    ASSERT_LT(labels.back(), static_cast<int>(rle.size()));
  }
}

TEST(ClusteringPropertyTest, ThresholdMonotonicity) {
  std::mt19937_64 rng(5);
  const double thresholds[] = {0.05, 0.2, 0.52, 1.0, 2.0, 3.0};
  for (int trial = 0; trial < 200; ++trial) {
    Slice s = random_slice(rng);
    std::size_t prev = s.size();
    for (double t : thresholds) {
      std::size_t n = encode_lines(s, ClusteringParams(t)).size();
      ASSERT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(ClusteringPropertyTest, RigidMotionAndScaleInvariance) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 300; ++trial) {
    Slice s = random_slice(rng);
    const Eigen::Matrix3d rot = testing::random_rotation(rng);
    const Vec3 shift(g(rng), g(rng), g(rng));
    const Vec3 center(g(rng), g(rng), g(rng));
    const double k = scale(rng);
    Slice moved = s;
    Slice scaled = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
      moved.entries[i].point = rot * s.point(i) + shift;
      scaled.entries[i].point = center + k * (s.point(i) - center);
    }
    const RleComponents rle = encode_lines(s, ClusteringParams());
    ASSERT_EQ(encode_lines(moved, ClusteringParams()), rle);
    ASSERT_EQ(encode_lines(scaled, ClusteringParams()), rle);
  }
}

}  // namespace
}  // namespace slicenormals
