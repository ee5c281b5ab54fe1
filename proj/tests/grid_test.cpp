// Copyright 2026 The Geoloc Authors
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
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "geoloc/grid.hpp"
#include "support.hpp"

using namespace geoloc;

namespace {

std::vector<GridPoint> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(25.0, 49.0), lon(-125.0, -67.0);
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({"u" + std::to_string(i), {lat(rng), lon(rng)}});
  return pts;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("n equal to bucket_size leaves the root unsplit") {
  const auto pts = random_points(20, 1);
  const auto g = KdTreeGrid::build(pts, 20);
  CHECK(g.num_regions() == 1);
  CHECK_FALSE(g.regions()[0].from_split);
  CHECK(g.assign({-80, 170}) == 0);
}

TEST_CASE("unit square with bucket 1 splits into four single-point leaves") {
  const std::vector<GridPoint> pts = {{"a", {0, 0}}, {"b", {0, 1}}, {"c", {1, 0}}, {"d", {1, 1}}};
  const auto g = KdTreeGrid::build(pts, 1);
  REQUIRE(g.num_regions() == 4);
  std::set<int> seen;
  for (const auto& p : pts) {
    const int r = g.assign(p.location);
    seen.insert(r);
    REQUIRE(g.regions()[r].members.size() == 1);
    CHECK(g.regions()[r].members[0].user_id == p.user_id);
    CHECK(g.decode(r) == p.location);
  }
  CHECK(seen.size() == 4);
  // Both coordinates spread by 1: longitude wins the tie and splits first.
  CHECK(g.nodes()[0].axis == Axis::kLon);
  CHECK(g.nodes()[0].split == 1.0);
}

TEST_CASE("points on a split value go right") {
  const std::vector<GridPoint> pts = {{"a", {0, 0}}, {"b", {0, 2}}, {"c", {0, 4}}};
  const auto g = KdTreeGrid::build(pts, 2);
  REQUIRE_FALSE(g.nodes()[0].is_leaf);
  CHECK(g.nodes()[0].split == 2.0);
  const int left = g.assign({0, 1.999});
  const int right = g.assign({0, 2.0});
  CHECK(left != right);
  CHECK(right == g.assign({0, 4}));
}

TEST_CASE("decode returns the lower coordinate-wise median of members") {
  {
    const std::vector<GridPoint> pts = {{"a", {0, 0}}, {"b", {2, 2}}, {"c", {4, 4}}};
    CHECK(KdTreeGrid::build(pts, 3).decode(0) == GeoPoint{2, 2});
  }
  {
    const std::vector<GridPoint> pts = {{"a", {5, 6}}};
    CHECK(KdTreeGrid::build(pts, 1).decode(0) == GeoPoint{5, 6});
  }
  {
    const std::vector<GridPoint> pts = {{"a", {0, 0}}, {"b", {0, 2}}};
    CHECK(KdTreeGrid::build(pts, 2).decode(0) == GeoPoint{0, 0});
  }
  const std::vector<GridPoint> pts = {{"a", {0, 0}}};
  CHECK_THROWS_AS(KdTreeGrid::build(pts, 1).decode(1), GridError);
  CHECK_THROWS_AS(KdTreeGrid::build(pts, 1).decode(-1), GridError);
}

TEST_CASE("coincident points form one oversized leaf") {
  std::vector<GridPoint> pts;
  for (int i = 0; i < 7; ++i) pts.push_back({"u" + std::to_string(i), {10, 20}});
  const auto g = KdTreeGrid::build(pts, 2);
  CHECK(g.num_regions() == 1);
  CHECK(g.regions()[0].members.size() == 7);
}

TEST_CASE("build rejects empty input and zero buckets") {
  CHECK_THROWS_AS(KdTreeGrid::build(std::vector<GridPoint>{}, 10), GridError);
  const auto pts = random_points(3, 2);
  CHECK_THROWS_AS(KdTreeGrid::build(pts, 0), GridError);
}

TEST_CASE("leaf populations, representatives and the partition hold exhaustively") {
  for (std::size_t bucket : {1u, 2u, 3u, 10u, 50u}) {
    for (std::size_t n : {5u, 51u, 333u, 1000u}) {
      const auto pts = random_points(n, n * 31 + bucket);
      const auto g = KdTreeGrid::build(pts, bucket);
      std::size_t total = 0;
      for (const auto& r : g.regions()) {
        total += r.members.size();
        CHECK(r.members.size() <= bucket);
        if (r.from_split) CHECK(r.members.size() >= bucket / 2);
        std::vector<WeightedPoint> w;
        for (const auto& m : r.members) {
          w.push_back({m.location, 1.0});
          CHECK(r.bounds.contains(m.location));
          CHECK(g.assign(m.location) == r.id);
        }
        CHECK(r.representative == coordwise_median(w));
        CHECK(r.bounds.contains(g.decode(r.id)));
      }
      CHECK(total == n);
      if (n > bucket) {
        CHECK(g.num_regions() >= ceil_div(n, bucket));
        CHECK(g.num_regions() <= ceil_div(n, std::max<std::size_t>(1, bucket / 2)));
      }
      std::mt19937_64 rng(n);
      std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
      for (int i = 0; i < 500; ++i) {
        const GeoPoint p{lat(rng), lon(rng)};
        const int r = g.assign(p);
        CHECK(r == g.assign(p));
        std::size_t containing = 0;
        for (const auto& reg : g.regions()) containing += reg.bounds.contains(p);
        CHECK(containing == 1);
        CHECK(g.regions()[r].bounds.contains(p));
      }
    }
  }
}

TEST_CASE("build is deterministic and serialization round-trips") {
  const auto pts = random_points(400, 9);
  CHECK(KdTreeGrid::build(pts, 30).serialize() == KdTreeGrid::build(pts, 30).serialize());
  auto g = KdTreeGrid::build(pts, 30);
  g.set_source_hash("abc123");
  const auto back = KdTreeGrid::deserialize(g.serialize());
  CHECK(back.serialize() == g.serialize());
  CHECK(back.hash() == g.hash());
  CHECK(back.source_hash() == "abc123");
  geoloc::testing::TempDir dir;
  g.save(dir / "grid.json");
  const auto loaded = KdTreeGrid::load(dir / "grid.json");
  for (const auto& p : pts) CHECK(loaded.assign(p.location) == g.assign(p.location));
  CHECK_THROWS_AS(KdTreeGrid::deserialize("{\"format\": \"nope\"}"), GridError);
}
