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

#include "geoloc/geo.hpp"

#include "geoloc/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace geoloc {

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint make_point(double lat, double lon) {
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
    throw std::invalid_argument("latitude out of range: " + std::to_string(lat));
  }
  if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0) {
    throw std::invalid_argument("longitude out of range: " + std::to_string(lon));
  }
  return {lat, lon};
}

std::string to_string(const GeoPoint& p) {
  return "(" + format_double(p.lat) + ", " + format_double(p.lon) + ")";
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double weighted_median_1d(std::span<const std::pair<double, double>> values) {
  if (values.empty()) {
    throw UnlocatableError("weighted median of an empty set");
  }
  double total = 0.0;
  for (const auto& [value, weight] : values) {
    if (!std::isfinite(value)) {
      throw std::invalid_argument("weighted median: non-finite value");
    }
    if (!std::isfinite(weight) || weight < 0.0) {
      throw std::invalid_argument("weighted median: weight must be finite and >= 0");
    }
    total += weight;
  }
  if (!(total > 0.0)) {
    throw UnlocatableError("weighted median: total weight is zero");
  }

  std::vector<std::pair<double, double>> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Compare 2*cumulative against total so that exact halves are reached
  // without dividing.
  double cumulative = 0.0;
  for (const auto& [value, weight] : sorted) {
    cumulative += weight;
    if (2.0 * cumulative >= total) return value;
  }
  // Rounding can leave the final partial sum a hair short of total.
  return sorted.back().first;
}

GeoPoint coordwise_median(std::span<const WeightedPoint> points) {
  std::vector<std::pair<double, double>> lats;
  std::vector<std::pair<double, double>> lons;
  lats.reserve(points.size());
  lons.reserve(points.size());
  for (const auto& wp : points) {
    lats.emplace_back(wp.point.lat, wp.weight);
    lons.emplace_back(wp.point.lon, wp.weight);
  }
  return {weighted_median_1d(lats), weighted_median_1d(lons)};
}

}  // namespace geoloc
