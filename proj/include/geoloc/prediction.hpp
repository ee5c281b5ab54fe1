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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geoloc/geo.hpp"

namespace geoloc {

// A method's output for one user; no location means the method could not
// place the user.
struct Prediction {
  std::string user_id;
  std::optional<GeoPoint> location;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictionFile {
  std::string method;
  std::string source_hash;  // upstream inputs, from the header line
  std::vector<Prediction> predictions;
};

// `user_id \t pred_lat \t pred_lon \t method \t located_flag` rows after a
// '#' header line. Unlocated rows carry empty coordinates and flag 0.
void write_predictions(std::ostream& out, const std::vector<Prediction>& predictions,
                       const std::string& method, const std::string& source_hash);
PredictionFile read_predictions(std::istream& in);

}  // namespace geoloc
