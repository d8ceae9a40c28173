// Copyright 2026 The trajlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trajlink/geometry.hpp"

namespace trajlink
{
namespace
{

Frame frame_of(std::vector<Point3> pts, SensorId id = 0, double t = 0.0)
{
  return Frame{id, t, std::move(pts)};
}

std::vector<Point3> blob(std::mt19937_64 & rng, double cx, double cy, int n, double r = 0.1)
{
  std::uniform_real_distribution<double> u(-r, r);
  std::uniform_real_distribution<double> z(0.0, 1.8);
  std::vector<Point3> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({cx + u(rng), cy + u(rng), z(rng)});
  }
  return pts;
}

TEST(Background, ConstantSceneMarksOccupiedVoxel)
{
  std::vector<Frame> frames(10, frame_of({{0.05, 0.05, 0.05}}));
  const auto model = build_background(frames, 0.1);
  EXPECT_EQ(model.background.size(), 1U);
  EXPECT_TRUE(model.is_background({0.01, 0.09, 0.02}));
}

TEST(Background, EmptyInputIsAnError)
{
  EXPECT_THROW(build_background({}, 0.1), DataError);
}

TEST(Background, OccupancyBelowThresholdIsForeground)
{
  std::vector<Frame> frames;
  for (int i = 0; i < 10; ++i) {
    frames.push_back(i < 4 ? frame_of({{0.05, 0.05, 0.05}}) : frame_of({}));
  }
  EXPECT_TRUE(build_background(frames, 0.1, 0.5).background.empty());
  EXPECT_EQ(build_background(frames, 0.1, 0.4).background.size(), 1U);
}

TEST(Background, MixedSensorsRejected)
{
  std::vector<Frame> frames{frame_of({}, 0), frame_of({}, 1)};
  EXPECT_THROW(build_background(frames, 0.1), std::invalid_argument);
}

TEST(Subtract, IdenticalFrameBecomesEmpty)
{
  std::mt19937_64 rng(1);
  const auto scene = blob(rng, 1.0, 1.0, 200, 1.0);
  std::vector<Frame> frames(5, frame_of(scene));
  const auto model = build_background(frames, 0.1);
  EXPECT_TRUE(subtract_background(frame_of(scene), model).points.empty());
}

TEST(Subtract, NewPointInFreeVoxelSurvives)
{
  std::vector<Point3> scene{{0.05, 0.05, 0.05}, {0.15, 0.05, 0.05}};
  const auto model = build_background(std::vector<Frame>(3, frame_of(scene)), 0.1);
  auto with_new = scene;
  with_new.push_back({2.05, 2.05, 0.5});
  const auto fg = subtract_background(frame_of(with_new), model);
  ASSERT_EQ(fg.points.size(), 1U);
  EXPECT_EQ(fg.points[0], (Point3{2.05, 2.05, 0.5}));
}

TEST(Subtract, MatchesPerPointLookup)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Point3> scene;
  for (int i = 0; i < 500; ++i) {
    scene.push_back({u(rng), u(rng), u(rng)});
  }
  const auto model = build_background(std::vector<Frame>(4, frame_of(scene)), 0.25);
  std::set<std::tuple<long long, long long, long long>> occupied;
  for (const auto & p : scene) {
    occupied.emplace(static_cast<long long>(std::floor(p.x / 0.25)), static_cast<long long>(std::floor(p.y / 0.25)),
                     static_cast<long long>(std::floor(p.z / 0.25)));
  }
  std::vector<Point3> probe;
  for (int i = 0; i < 2000; ++i) {
    probe.push_back({u(rng), u(rng), u(rng)});
  }
  const auto fg = subtract_background(frame_of(probe), model);
  std::vector<Point3> expected;
  for (const auto & p : probe) {
    const auto key = std::make_tuple(static_cast<long long>(std::floor(p.x / 0.25)),
                                     static_cast<long long>(std::floor(p.y / 0.25)),
                                     static_cast<long long>(std::floor(p.z / 0.25)));
    if (!occupied.count(key)) {
      expected.push_back(p);
    }
  }
  EXPECT_EQ(fg.points, expected);
}

TEST(Downsample, SingleCellCentroid)
{
  const std::vector<Point3> pts{{0.01, 0.02, 0.00}, {0.04, 0.01, 0.03}};
  const auto out = voxel_downsample(pts, 0.1);
  ASSERT_EQ(out.size(), 1U);
  EXPECT_NEAR(out[0].x, 0.025, 1e-12);
  EXPECT_NEAR(out[0].y, 0.015, 1e-12);
  EXPECT_NEAR(out[0].z, 0.015, 1e-12);
}

TEST(Downsample, EmptyAndInvalidCell)
{
  EXPECT_TRUE(voxel_downsample({}, 0.1).empty());
  const std::vector<Point3> pts{{0, 0, 0}};
  EXPECT_THROW(voxel_downsample(pts, 0.0), std::invalid_argument);
  EXPECT_THROW(voxel_downsample(pts, -1.0), std::invalid_argument);
}

TEST(Downsample, MatchesHashGridOracle)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 1000; ++i) {
    pts.push_back({u(rng), u(rng), u(rng)});
  }
  const auto out = voxel_downsample(pts, 0.05);
  const auto expected = oracle::grid_centroids(pts, 0.05);
  ASSERT_EQ(out.size(), expected.size());
  std::size_t i = 0;
  for (const auto & [key, c] : expected) {
    EXPECT_NEAR(out[i].x, c.x, 1e-12);
    EXPECT_NEAR(out[i].y, c.y, 1e-12);
    EXPECT_NEAR(out[i].z, c.z, 1e-12);
    ++i;
  }
  EXPECT_LE(out.size(), pts.size());
}

TEST(Downsample, IdempotentOnceEachCellHoldsOnePoint)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 800; ++i) {
    pts.push_back({u(rng), u(rng), u(rng)});
  }
  const auto once = voxel_downsample(pts, 0.1);
  const auto twice = voxel_downsample(once, 0.1);
  EXPECT_EQ(once, twice);
}

TEST(Segmentation, TwoSeparatedBlobs)
{
  std::mt19937_64 rng(3);
  auto pts = blob(rng, 0.0, 0.0, 20);
  const auto other = blob(rng, 2.0, 0.0, 20);
  pts.insert(pts.end(), other.begin(), other.end());
  const auto segs = segment_humans(frame_of(pts), 0.3, 5);
  ASSERT_EQ(segs.size(), 2U);
  for (const auto & s : segs) {
    EXPECT_EQ(s.points.size(), 20U);
  }
}

TEST(Segmentation, IsolatedPointsAreNoise)
{
  const std::vector<Point3> pts{{0, 0, 0}, {5, 0, 0}, {0, 5, 0}};
  EXPECT_TRUE(segment_humans(frame_of(pts), 0.3, 4).empty());
}

TEST(Segmentation, ClusteringIgnoresHeight)
{
  std::vector<Point3> column;
  for (int i = 0; i < 10; ++i) {
    column.push_back({0.0, 0.0, 0.5 * i});
  }
  EXPECT_EQ(segment_humans(frame_of(column), 0.1, 3).size(), 1U);
}

TEST(Segmentation, CentroidIsMeanOfMemberXY)
{
  std::mt19937_64 rng(9);
  const auto pts = blob(rng, 1.0, -2.0, 30);
  const auto segs = segment_humans(frame_of(pts), 0.3, 5);
  ASSERT_EQ(segs.size(), 1U);
  double sx = 0.0;
  double sy = 0.0;
  for (const auto & p : segs[0].points) {
    sx += p.x;
    sy += p.y;
  }
  EXPECT_NEAR(segs[0].centroid.x, sx / 30.0, 1e-12);
  EXPECT_NEAR(segs[0].centroid.y, sy / 30.0, 1e-12);
}

class DbscanOracle : public ::testing::TestWithParam<int>
{
};

TEST_P(DbscanOracle, MatchesQuadraticReference)
{
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<Point3> pts;
  const int n = 50 + GetParam() * 7;
  for (int i = 0; i < n; ++i) {
    pts.push_back({u(rng), u(rng), u(rng)});
  }
  std::sort(pts.begin(), pts.end());
  const auto got = dbscan_xy(pts, 0.35, 4);
  const auto expected = oracle::dbscan(pts, 0.35, 4);
  // Border points reachable from two clusters may legitimately go either
  // way, so compare core-point partitions and the noise set.
  std::vector<int> got_core;
  std::vector<int> exp_core;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t nb = 0;
    for (const auto & q : pts) {
      nb += std::hypot(q.x - pts[i].x, q.y - pts[i].y) <= 0.35 ? 1 : 0;
    }
    EXPECT_EQ(got[i] < 0, expected[i] < 0) << "point " << i;
    if (nb >= 4) {
      got_core.push_back(got[i]);
      exp_core.push_back(expected[i]);
    }
  }
  EXPECT_TRUE(oracle::same_partition(got_core, exp_core));
}

INSTANTIATE_TEST_SUITE_P(Random, DbscanOracle, ::testing::Range(0, 20));

TEST(Segmentation, PermutationInvariantAndDisjoint)
{
  std::mt19937_64 rng(21);
  std::vector<Point3> pts;
  for (int k = 0; k < 5; ++k) {
    const auto b = blob(rng, k * 0.9, 0.3 * k, 25, 0.2);
    pts.insert(pts.end(), b.begin(), b.end());
  }
  const auto reference = segment_humans(frame_of(pts), 0.3, 5);
  std::set<Point3> seen;
  for (const auto & s : reference) {
    for (const auto & p : s.points) {
      EXPECT_TRUE(seen.insert(p).second) << "point in two segments";
      EXPECT_NE(std::find(pts.begin(), pts.end(), p), pts.end());
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto segs = segment_humans(frame_of(pts), 0.3, 5);
    ASSERT_EQ(segs.size(), reference.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      std::set<Point3> a(segs[i].points.begin(), segs[i].points.end());
      std::set<Point3> b(reference[i].points.begin(), reference[i].points.end());
      EXPECT_EQ(a, b);
    }
  }
}

TEST(Segmentation, MinClusterSizeFilters)
{
  std::mt19937_64 rng(4);
  auto pts = blob(rng, 0.0, 0.0, 40);
  const auto small = blob(rng, 3.0, 0.0, 6);
  pts.insert(pts.end(), small.begin(), small.end());
  const auto segs = segment_humans(frame_of(pts), 0.3, 5, 10);
  ASSERT_EQ(segs.size(), 1U);
  EXPECT_GE(segs[0].points.size(), 10U);
}

TEST(Extract, FullPipelineFindsForegroundPerson)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<Point3> floor;
  for (int i = 0; i < 400; ++i) {
    floor.push_back({u(rng), u(rng), 0.0});
  }
  const auto model = build_background(std::vector<Frame>(5, frame_of(floor)), 0.1);
  auto scene = floor;
  const auto person = blob(rng, 2.5, 2.5, 300, 0.15);
  scene.insert(scene.end(), person.begin(), person.end());
  GeometryConfig cfg;
  const auto segs = extract_segments(frame_of(scene), &model, cfg);
  ASSERT_EQ(segs.size(), 1U);
  EXPECT_NEAR(segs[0].centroid.x, 2.5, 0.1);
  EXPECT_NEAR(segs[0].centroid.y, 2.5, 0.1);
}

}  // namespace
}  // namespace trajlink
