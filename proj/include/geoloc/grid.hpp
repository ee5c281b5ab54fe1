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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoloc/geo.hpp"

namespace geoloc {

enum class Axis { kLat, kLon };

struct GridPoint {
  std::string user_id;
  GeoPoint location;
};

// Axis-aligned cell in degree space. Intervals are half-open [min, max)
// except at the +90 / +180 edge of the globe, which is closed.
struct CellBounds {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;

  bool contains(const GeoPoint& p) const noexcept;
};

struct KdNode {
  bool is_leaf = true;
  Axis axis = Axis::kLon;
  double split = 0.0;  // coordinate < split goes left, >= split goes right
  int left = -1;
  int right = -1;
  int region = -1;  // leaves only
};

struct Region {
  int id = 0;
  std::vector<GridPoint> members;
  GeoPoint representative;  // coordinate-wise median of member locations
  CellBounds bounds;
  bool from_split = false;  // false only for an unsplit root
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive partition of training locations into leaf regions holding at
// most bucket_size users each. Regions are the class labels of the text
// classifier.
class KdTreeGrid {
 public:
  // Recursive median splits on the axis with the larger spread (ties go to
  // longitude) until every leaf holds <= bucket_size points. A node whose
  // points are all coincident is never split.
  static KdTreeGrid build(std::span<const GridPoint> train, std::size_t bucket_size);

  int assign(const GeoPoint& p) const;
  const GeoPoint& decode(int region) const;

  std::size_t num_regions() const noexcept { return regions_.size(); }
  std::size_t bucket_size() const noexcept { return bucket_size_; }
  std::span<const KdNode> nodes() const noexcept { return nodes_; }
  std::span<const Region> regions() const noexcept { return regions_; }

  // Hash of whatever the grid was built from; recorded in the artifact.
  const std::string& source_hash() const noexcept { return source_hash_; }
  void set_source_hash(std::string hash) { source_hash_ = std::move(hash); }

  // Versioned JSON layout: a flat node list with child indices, leaf
  // members and representatives.
  std::string serialize() const;
  static KdTreeGrid deserialize(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static KdTreeGrid load(const std::filesystem::path& path);

  // SHA-256 of serialize().
  std::string hash() const;

 private:
  int build_node(std::vector<GridPoint> points, const CellBounds& bounds, bool from_split);

  std::size_t bucket_size_ = 1;
  std::vector<KdNode> nodes_;
  std::vector<Region> regions_;
  std::string source_hash_;
};

}  // namespace geoloc
