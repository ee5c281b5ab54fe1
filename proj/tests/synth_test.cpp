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


#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "doctest.h"
#include "geoloc/features.hpp"
#include "geoloc/graph.hpp"
#include "geoloc/synth.hpp"

using namespace geoloc;

namespace {

std::string as_tsv(const Dataset& d) {
  std::ostringstream out;
  write_dataset(out, d, DatasetFormat::kTsv);
  return out.str();
}

}  // namespace

TEST_CASE("synthesize is a pure function of its parameters") {
  SynthConfig c;
  c.num_regions = 4;
  c.users_per_region = 50;
  c.vocab_per_region = 20;
  c.mention_density = 0.1;
  c.seed = 7;
  const auto a = synthesize(c), b = synthesize(c);
  CHECK(as_tsv(a.dataset) == as_tsv(b.dataset));
  CHECK(a.region_centres == b.region_centres);
  c.seed = 8;
  CHECK(as_tsv(synthesize(c).dataset) != as_tsv(a.dataset));
}

TEST_CASE("synthetic corpora are valid and honour the split sizes") {
  SynthConfig c;
  c.users_per_region = 75;
  c.dev_fraction = 1.0 / 6;
  c.test_fraction = 1.0 / 6;
  c.isolated_test_fraction = 0.3;
  const auto s = synthesize(c);
  CHECK_NOTHROW(validate(s.dataset));
  CHECK(s.dataset.records.size() == 300);
  CHECK(s.dataset.count(Split::kTrain) == 200);
  CHECK(s.dataset.count(Split::kTest) == 50);
  std::size_t isolated = 0;
  for (std::size_t i = 0; i < s.isolated.size(); ++i) {
    if (!s.isolated[i]) continue;
    ++isolated;
    CHECK(s.dataset.records[i].split == Split::kTest);
  }
  CHECK(isolated == 15);
  for (std::size_t i = 0; i + 1 < s.region_centres.size(); ++i) {
    for (std::size_t j = i + 1; j < s.region_centres.size(); ++j) {
      CHECK(haversine_km(s.region_centres[i], s.region_centres[j]) >= c.min_separation_km / 2);
    }
  }
}

TEST_CASE("zero mention density produces no mention tokens") {
  SynthConfig c;
  c.mention_density = 0.0;
  const auto s = synthesize(c);
  CHECK(s.mentions.empty());
  for (const auto& r : s.dataset.records) {
    for (const auto& tok : tokenize(r.text)) CHECK_FALSE(is_mention(tok));
  }
}

TEST_CASE("mention homophily matches the configured probability") {
  SynthConfig c;
  c.num_regions = 2;
  c.users_per_region = 100;
  c.mention_density = 0.1;
  c.within_region_prob = 0.8;
  c.external_prob = 0.2;
  c.seed = 3;
  const auto s = synthesize(c);
  // Count from the emitted text and the region of each handle, not from the
  // generator's own flags.
  std::map<std::string, std::size_t> region_of;
  for (std::size_t i = 0; i < s.dataset.records.size(); ++i) region_of[s.dataset.records[i].user_id] = s.user_region[i];
  std::size_t total = 0, within = 0;
  for (std::size_t i = 0; i < s.dataset.records.size(); ++i) {
    for (const auto& tok : tokenize(s.dataset.records[i].text)) {
      if (!is_mention(tok)) continue;
      const auto handle = tok.substr(1);
      const auto it = region_of.find(handle);
      const std::size_t target = it != region_of.end() ? it->second : s.handle_region.at(handle);
      ++total;
      within += target == s.user_region[i];
    }
  }
  REQUIRE(total > 500);
  const double p = c.within_region_prob;
  const double sigma = std::sqrt(total * p * (1 - p));
  CHECK(std::abs(static_cast<double>(within) - total * p) <= 3 * sigma);
}

TEST_CASE("graph statistics match the generator's bookkeeping") {
  SynthConfig c;
  c.seed = 5;
  c.external_prob = 0.3;
  const auto s = synthesize(c);
  const auto g = MentionGraph::build(s.dataset);
  std::set<std::string> externals;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& m : s.mentions) {
    const auto& src = s.dataset.records[m.source].user_id;
    if (m.external) externals.insert(m.target);
    pairs.insert(std::minmax(src, m.target));
  }
  const auto st = g.stats();
  CHECK(st.total_mentions == s.mentions.size());
  CHECK(st.external_nodes == externals.size());
  CHECK(st.edges == pairs.size());
  CHECK(st.train_nodes == s.dataset.count(Split::kTrain));
  CHECK(st.test_nodes == s.dataset.count(Split::kTest));
}

TEST_CASE("invalid generator parameters are rejected") {
  SynthConfig c;
  c.num_regions = 0;
  CHECK_THROWS_AS(synthesize(c), std::invalid_argument);
  c = {};
  c.dev_fraction = 0.7;
  c.test_fraction = 0.5;
  CHECK_THROWS_AS(synthesize(c), std::invalid_argument);
}
