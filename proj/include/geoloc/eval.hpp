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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoloc/corpus.hpp"
#include "geoloc/geo.hpp"
#include "geoloc/prediction.hpp"

namespace geoloc {

// Errors strictly below this count as hits.
inline constexpr double kAccuracyRadiusKm = 161.0;

struct EvalReport {
  double acc161 = 0.0;
  double mean_km = 0.0;
  double median_km = 0.0;  // lower median
  double coverage = 0.0;   // located / considered
  std::size_t n = 0;       // located users that were scored
  std::size_t total = 0;   // users considered, located or not
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using GoldMap = std::unordered_map<std::string, GeoPoint>;

GoldMap gold_locations(const Dataset& dataset, Split split);

// Scores located predictions against gold; unlocated users only lower
// coverage. Throws EvalError when nothing can be scored or a prediction
// has no gold location.
EvalReport evaluate(std::span<const Prediction> predictions, const GoldMap& gold);

// Same, restricted to users accepted by `include`.
EvalReport evaluate_subset(std::span<const Prediction> predictions, const GoldMap& gold,
                           const std::function<bool(const std::string&)>& include);

struct EvalBreakdown {
  EvalReport overall;
  std::optional<EvalReport> connected;     // users with a path to a train node
  std::optional<EvalReport> disconnected;  // users without one
};

std::string report_json(const EvalReport& report);
std::string breakdown_json(const EvalBreakdown& breakdown, std::string_view method);
std::string breakdown_text(const EvalBreakdown& breakdown, std::string_view method);

}  // namespace geoloc
