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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geoloc/corpus.hpp"
#include "geoloc/geo.hpp"

namespace geoloc {

// Parameters of the synthetic corpus generator. Users cluster around
// region centres (optionally in tighter communities inside a region),
// write region-specific words mixed with shared noise words, and mention
// other users with a configurable preference for their own region.
struct SynthConfig {
  std::size_t num_regions = 4;
  std::size_t users_per_region = 50;
  std::size_t vocab_per_region = 20;
  // Each non-isolated user makes 1 + Binomial(users_per_region - 1,
  // mention_density) mentions; 0 disables mentions entirely.
  double mention_density = 0.1;
  std::uint64_t seed = 7;

  double dev_fraction = 0.1;
  double test_fraction = 0.2;
  // Test users that neither mention nor get mentioned.
  double isolated_test_fraction = 0.0;

  double within_region_prob = 0.9;
  double external_prob = 0.1;
  std::size_t externals_per_region = 5;

  std::size_t communities_per_region = 1;
  // Probability that a within-region mention stays inside the community.
  double community_prob = 0.0;
  double community_spread_km = 60.0;
  double user_spread_km = 25.0;
  double min_separation_km = 1000.0;

  std::size_t words_per_user = 40;
  double region_word_prob = 0.5;
  double community_word_prob = 0.0;
  std::size_t noise_vocab = 100;
};

struct MentionEvent {
  std::size_t source = 0;  // index into dataset.records
  std::string target;      // handle without '@'
  bool within_region = false;
  bool external = false;
};

struct SyntheticCorpus {
  Dataset dataset;
  SynthConfig config;
  std::vector<GeoPoint> region_centres;
  std::vector<GeoPoint> community_centres;  // region-major
  std::vector<std::size_t> user_region;     // parallel to dataset.records
  std::vector<std::size_t> user_community;  // global community index
  std::vector<bool> isolated;
  std::map<std::string, std::size_t> handle_region;  // users and externals
  std::vector<MentionEvent> mentions;

  const GeoPoint& centre_of(std::size_t record) const { return region_centres[user_region[record]]; }
};

// Deterministic in its parameters. Throws std::invalid_argument for
// non-positive counts or probabilities outside [0, 1].
SyntheticCorpus synthesize(const SynthConfig& config);

}  // namespace geoloc
