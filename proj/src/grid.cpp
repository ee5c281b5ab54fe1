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

#include "geoloc/grid.hpp"

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

constexpr int kGridFormatVersion = 1;

double coord(const GeoPoint& p, Axis axis) { return axis == Axis::kLat ? p.lat : p.lon; }

std::string_view axis_name(Axis axis) { return axis == Axis::kLat ? "lat" : "lon"; }

GeoPoint median_of(std::span<const GridPoint> points) {
  std::vector<WeightedPoint> weighted;
  weighted.reserve(points.size());
  for (const auto& gp : points) weighted.push_back({gp.location, 1.0});
  return coordwise_median(weighted);
}

}  // namespace

bool CellBounds::contains(const GeoPoint& p) const noexcept {
  const bool lat_ok = p.lat >= lat_min && (p.lat < lat_max || (lat_max == 90.0 && p.lat == 90.0));
  const bool lon_ok =
      p.lon >= lon_min && (p.lon < lon_max || (lon_max == 180.0 && p.lon == 180.0));
  return lat_ok && lon_ok;
}

KdTreeGrid KdTreeGrid::build(std::span<const GridPoint> train, std::size_t bucket_size) {
  if (train.empty()) throw GridError("cannot build a grid from zero training points");
  if (bucket_size == 0) throw GridError("bucket_size must be >= 1");
  for (const auto& gp : train) {
    if (!is_valid(gp.location)) {
      throw GridError("invalid training location for '" + gp.user_id + "'");
    }
  }
  KdTreeGrid grid;
  grid.bucket_size_ = bucket_size;
  grid.build_node(std::vector<GridPoint>(train.begin(), train.end()), CellBounds{}, false);
  return grid;
}

int KdTreeGrid::build_node(std::vector<GridPoint> points, const CellBounds& bounds,
                           bool from_split) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  auto make_leaf = [&]() {
    Region region;
    region.id = static_cast<int>(regions_.size());
    region.representative = median_of(points);
    region.bounds = bounds;
    region.from_split = from_split;
    region.members = std::move(points);
    nodes_[index].is_leaf = true;
    nodes_[index].region = region.id;
    regions_.push_back(std::move(region));
    return index;
  };

  if (points.size() <= bucket_size_) return make_leaf();

  auto [lat_lo, lat_hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const GridPoint& a, const GridPoint& b) { return a.location.lat < b.location.lat; });
  auto [lon_lo, lon_hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const GridPoint& a, const GridPoint& b) { return a.location.lon < b.location.lon; });
  const double lat_spread = lat_hi->location.lat - lat_lo->location.lat;
  const double lon_spread = lon_hi->location.lon - lon_lo->location.lon;
  if (lat_spread == 0.0 && lon_spread == 0.0) return make_leaf();  // coincident

  const Axis axis = lat_spread > lon_spread ? Axis::kLat : Axis::kLon;
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& gp : points) values.push_back(coord(gp.location, axis));
  std::sort(values.begin(), values.end());

  // Lower median. When it equals the minimum the strict-less rule would
  // leave the left side empty, so move up to the next distinct value.
  double split = values[(values.size() - 1) / 2];
  if (split == values.front()) {
    split = *std::upper_bound(values.begin(), values.end(), split);
  }

  std::vector<GridPoint> left;
  std::vector<GridPoint> right;
  for (auto& gp : points) {
    (coord(gp.location, axis) < split ? left : right).push_back(std::move(gp));
  }

  CellBounds left_bounds = bounds;
  CellBounds right_bounds = bounds;
  if (axis == Axis::kLat) {
    left_bounds.lat_max = split;
    right_bounds.lat_min = split;
  } else {
    left_bounds.lon_max = split;
    right_bounds.lon_min = split;
  }

  nodes_[index].is_leaf = false;
  nodes_[index].axis = axis;
  nodes_[index].split = split;
  const int l = build_node(std::move(left), left_bounds, true);
  const int r = build_node(std::move(right), right_bounds, true);
  nodes_[index].left = l;
  nodes_[index].right = r;
  return index;
}

int KdTreeGrid::assign(const GeoPoint& p) const {
  int node = 0;
  while (!nodes_[node].is_leaf) {
    const KdNode& n = nodes_[node];
    node = coord(p, n.axis) < n.split ? n.left : n.right;
  }
  return nodes_[node].region;
}

const GeoPoint& KdTreeGrid::decode(int region) const {
  if (region < 0 || static_cast<std::size_t>(region) >= regions_.size()) {
    throw GridError("unknown region id " + std::to_string(region));
  }
  return regions_[region].representative;
}

std::string KdTreeGrid::serialize() const {
  nlohmann::ordered_json doc;
  doc["format"] = "geoloc-kdgrid";
  doc["version"] = kGridFormatVersion;
  doc["bucket_size"] = bucket_size_;
  doc["source_hash"] = source_hash_;
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    nlohmann::ordered_json node;
    if (!n.is_leaf) {
      node["kind"] = "split";
      node["axis"] = axis_name(n.axis);
      node["value"] = n.split;
      node["left"] = n.left;
      node["right"] = n.right;
    } else {
      const Region& r = regions_[n.region];
      node["kind"] = "leaf";
      node["region"] = r.id;
      node["from_split"] = r.from_split;
      node["representative"] = {r.representative.lat, r.representative.lon};
      node["bounds"] = {r.bounds.lat_min, r.bounds.lat_max, r.bounds.lon_min, r.bounds.lon_max};
      auto& members = node["members"] = nlohmann::ordered_json::array();
      for (const auto& m : r.members) {
        members.push_back({m.user_id, m.location.lat, m.location.lon});
      }
    }
    nodes.push_back(std::move(node));
  }
  return doc.dump(1) + "\n";
}

KdTreeGrid KdTreeGrid::deserialize(std::string_view json) {
  KdTreeGrid grid;
  try {
    const auto doc = nlohmann::json::parse(json);
    if (doc.at("format") != "geoloc-kdgrid") throw GridError("not a grid artifact");
    if (doc.at("version") != kGridFormatVersion) {
      throw GridError("unsupported grid version " + doc.at("version").dump());
    }
    grid.bucket_size_ = doc.at("bucket_size").get<std::size_t>();
    grid.source_hash_ = doc.value("source_hash", std::string{});
    const auto& nodes = doc.at("nodes");
    grid.nodes_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& node = nodes[i];
      KdNode& n = grid.nodes_[i];
      if (node.at("kind") == "split") {
        n.is_leaf = false;
        n.axis = node.at("axis") == "lat" ? Axis::kLat : Axis::kLon;
        n.split = node.at("value").get<double>();
        n.left = node.at("left").get<int>();
        n.right = node.at("right").get<int>();
        const int count = static_cast<int>(nodes.size());
        if (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= count ||
            n.right >= count) {
          throw GridError("grid node " + std::to_string(i) + " has invalid children");
        }
      } else {
        Region r;
        r.id = node.at("region").get<int>();
        r.from_split = node.at("from_split").get<bool>();
        const auto& rep = node.at("representative");
        r.representative = {rep.at(0).get<double>(), rep.at(1).get<double>()};
        const auto& b = node.at("bounds");
        r.bounds = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                    b.at(3).get<double>()};
        for (const auto& m : node.at("members")) {
          r.members.push_back(
              {m.at(0).get<std::string>(), {m.at(1).get<double>(), m.at(2).get<double>()}});
        }
        if (r.id != static_cast<int>(grid.regions_.size())) {
          throw GridError("grid regions are not densely numbered");
        }
        n.is_leaf = true;
        n.region = r.id;
        grid.regions_.push_back(std::move(r));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw GridError(std::string("malformed grid artifact: ") + e.what());
  }
  if (grid.nodes_.empty()) throw GridError("grid artifact has no nodes");
  return grid;
}

void KdTreeGrid::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridError("cannot write grid '" + path.string() + "'");
  out << serialize();
}

KdTreeGrid KdTreeGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridError("cannot open grid '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::string KdTreeGrid::hash() const { return sha256_hex(serialize()); }

}  // namespace geoloc
