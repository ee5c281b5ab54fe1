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

#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace geoloc {

// Mean Earth radius used by every distance computation in the toolkit.
inline constexpr double kEarthRadiusKm = 6371.0;

// Half the circumference; the largest possible haversine distance.
inline constexpr double kMaxDistanceKm = std::numbers::pi * kEarthRadiusKm;

// A latitude/longitude pair in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct WeightedPoint {
  GeoPoint point;
  double weight = 1.0;
};

// Raised when an aggregate has nothing to aggregate (no items, or zero
// total weight). Propagation treats such a node as unlocated.
class UnlocatableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_valid(const GeoPoint& p) noexcept;

// Throws std::invalid_argument naming the offending coordinate.
GeoPoint make_point(double lat, double lon);

std::string to_string(const GeoPoint& p);

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

// Lower weighted median: the smallest value v whose cumulative weight
// (over items <= v) reaches half of the total weight.
double weighted_median_1d(std::span<const std::pair<double, double>> values);

// Coordinate-wise weighted median. Latitude and longitude are reduced
// independently; no dateline wrap-around is attempted.
GeoPoint coordwise_median(std::span<const WeightedPoint> points);

}  // namespace geoloc
