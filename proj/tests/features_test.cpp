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
#include <string>
#include <vector>

#include "doctest.h"
#include "geoloc/features.hpp"
#include "support.hpp"

using namespace geoloc;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize examples") {
  CHECK(tokenize("Hello @Bob hello!") == Tokens{"hello", "@bob", "hello"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("@a @a @b") == Tokens{"@a", "@a", "@b"});
  CHECK(tokenize("  \"(Quoted)\"\t...  ") == Tokens{"quoted"});
  CHECK(tokenize("(@Bob: #Go! don't") == Tokens{"@bob", "#go", "don't"});
  CHECK(tokenize("@ @! a@b") == Tokens{"a@b"});
  CHECK(is_mention("@x"));
  CHECK_FALSE(is_mention("@"));
  CHECK_FALSE(is_mention("x"));
}

TEST_CASE("min_df counts documents at the threshold") {
  std::vector<std::string> docs;
  for (int i = 0; i < 20; ++i) {
    std::string d = "filler";
    if (i < 9) d += " nine nine";  // repeated within a document: still one df
    if (i < 10) d += " ten";
    docs.push_back(d);
  }
  const auto v = Vocabulary::fit(docs, 10);
  CHECK_FALSE(v.index_of("nine").has_value());
  CHECK(v.index_of("ten").has_value());
  CHECK(v.document_frequency(*v.index_of("ten")) == 10);
  CHECK_THROWS_AS(Vocabulary::fit(std::vector<std::string>{}, 1), VocabularyError);
}

TEST_CASE("indices are dense and lexicographic") {
  const std::vector<std::string> docs = {"zeta alpha", "mid alpha", "zeta"};
  const auto v = Vocabulary::fit(docs, 1);
  REQUIRE(v.size() == 3);
  CHECK(v.token(0) == "alpha");
  CHECK(v.token(1) == "mid");
  CHECK(v.token(2) == "zeta");
}

TEST_CASE("tf-idf values from the declared formulas") {
  const std::vector<std::string> docs = {"a b", "a c", "a b d"};
  const auto v = Vocabulary::fit(docs, 1);
  REQUIRE(v.size() == 4);
  CHECK(v.idf(0) == 0.0);
  // b: 1 * ln(3/2), c: 2 * ln(3), then unit norm. "a" has idf 0 and drops out.
  const auto x = transform("b c c a", v);
  REQUIRE(x.indices == std::vector<std::uint32_t>{1, 2});
  CHECK(x.values[0] == doctest::Approx(0.18147115159841573).epsilon(1e-12));
  CHECK(x.values[1] == doctest::Approx(0.9833962686209181).epsilon(1e-12));
  CHECK(x.dimension == 4);
}

TEST_CASE("degenerate documents") {
  const std::vector<std::string> docs = {"a b", "c", "d"};
  const auto v = Vocabulary::fit(docs, 1);
  CHECK(transform("unknown words", v).empty());
  CHECK(transform("", v).empty());
  const auto one = transform("c c c c", v);
  REQUIRE(one.nnz() == 1);
  CHECK(one.values[0] == 1.0);
}

TEST_CASE("transform properties on random documents") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> word(0, 40), len(0, 30);
  auto doc = [&] {
    std::string d;
    for (int i = len(rng); i > 0; --i) d += "w" + std::to_string(word(rng)) + " ";
    return d;
  };
  std::vector<std::string> docs;
  for (int i = 0; i < 60; ++i) docs.push_back(doc());
  const auto v = Vocabulary::fit(docs, 3);
  auto shuffled = docs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(Vocabulary::fit(shuffled, 3) == v);
  for (int i = 0; i < 200; ++i) {
    const auto d = doc();
    const auto x = transform(d, v);
    if (!x.empty()) CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::is_sorted(x.indices.begin(), x.indices.end()));
    CHECK(std::adjacent_find(x.indices.begin(), x.indices.end()) == x.indices.end());
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      CHECK(x.indices[k] < v.size());
      CHECK(x.values[k] != 0.0);
      CHECK(std::isfinite(x.values[k]));
    }
    CHECK(transform(d + " " + d, v) == x);
  }
}

TEST_CASE("vocabulary serialization round-trips") {
  const std::vector<std::string> docs = {"a b", "a c", "a b d", "#tag @who"};
  auto v = Vocabulary::fit(docs, 1);
  v.set_source_hash("deadbeef");
  const auto back = Vocabulary::deserialize(v.serialize());
  CHECK(back == v);
  CHECK(back.source_hash() == "deadbeef");
  CHECK(back.hash() == v.hash());
  CHECK(v.serialize().starts_with("# geoloc-vocab v1"));
  geoloc::testing::TempDir dir;
  v.save(dir / "vocab.tsv");
  CHECK(Vocabulary::load(dir / "vocab.tsv") == v);
  CHECK_THROWS_AS(Vocabulary::deserialize("a\t0\t1\n"), VocabularyError);
}
