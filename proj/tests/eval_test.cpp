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
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "geoloc/eval.hpp"
#include "geoloc/prediction.hpp"
#include "support.hpp"
#include "json.hpp"

using namespace geoloc;

namespace {

// A latitude offset whose great-circle error is exactly 161 km in double
// arithmetic, found by walking ulps around the analytic value.
std::optional<double> exact_161_offset() {
  double lat = 161.0 / kEarthRadiusKm * 180.0 / std::numbers::pi;
  lat = std::nextafter(lat, 0.0);
  for (int i = 0; i < 4000; ++i) {
    const double lo = std::nextafter(lat, 0.0);
    if (haversine_km({0, 0}, {lo, 0}) < 161.0) break;
    lat = lo;
  }
  for (int i = 0; i < 8000; ++i) {
    const double d = haversine_km({0, 0}, {lat, 0});
    if (d == 161.0) return lat;
    if (d > 161.0) break;
    lat = std::nextafter(lat, 90.0);
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("perfect predictions") {
  const GoldMap gold = {{"a", {1, 2}}, {"b", {3, 4}}};
  const std::vector<Prediction> p = {{"a", GeoPoint{1, 2}}, {"b", GeoPoint{3, 4}}};
  const auto r = evaluate(p, gold);
  CHECK(r.acc161 == 1.0);
  CHECK(r.mean_km == 0.0);
  CHECK(r.median_km == 0.0);
  CHECK(r.coverage == 1.0);
  CHECK(r.n == 2);
}

TEST_CASE("one exact and one antipodal prediction") {
  const GoldMap gold = {{"a", {0, 0}}, {"b", {0, 0}}};
  const std::vector<Prediction> p = {{"a", GeoPoint{0, 0}}, {"b", GeoPoint{0, 180}}};
  const auto r = evaluate(p, gold);
  CHECK(r.acc161 == 0.5);
  CHECK(r.mean_km == doctest::Approx(kMaxDistanceKm / 2).epsilon(1e-12));
  CHECK(r.mean_km == doctest::Approx(10007.5).epsilon(1e-5));
  CHECK(r.median_km == 0.0);
}

TEST_CASE("the accuracy radius is exclusive") {
  const auto lat = exact_161_offset();
  REQUIRE(lat.has_value());
  const GoldMap gold = {{"edge", {0, 0}}, {"inside", {0, 0}}};
  const std::vector<Prediction> p = {{"edge", GeoPoint{*lat, 0}},
                                     {"inside", GeoPoint{std::nextafter(*lat, 0.0), 0}}};
  CHECK(haversine_km({0, 0}, {*lat, 0}) == 161.0);
  const auto r = evaluate(p, gold);
  CHECK(r.acc161 == 0.5);
}

TEST_CASE("unlocated users only reduce coverage") {
  const GoldMap gold = {{"a", {0, 0}}, {"b", {10, 10}}, {"c", {5, 5}}};
  const std::vector<Prediction> p = {{"a", GeoPoint{0, 0}}, {"b", std::nullopt}, {"c", std::nullopt}};
  const auto r = evaluate(p, gold);
  CHECK(r.n == 1);
  CHECK(r.total == 3);
  CHECK(r.coverage == doctest::Approx(1.0 / 3));
  CHECK(r.median_km == 0.0);
  const std::vector<Prediction> none = {{"b", std::nullopt}};
  CHECK_THROWS_AS(evaluate(none, gold), EvalError);
  CHECK_THROWS_AS(evaluate(std::vector<Prediction>{}, gold), EvalError);
  const std::vector<Prediction> stranger = {{"zz", GeoPoint{0, 0}}};
  CHECK_THROWS_AS(evaluate(stranger, gold), EvalError);
}

TEST_CASE("evaluate is permutation invariant and subsets see only their users") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lat(20, 50), lon(-120, -70);
  GoldMap gold;
  std::vector<Prediction> preds;
  for (int i = 0; i < 101; ++i) {
    const std::string id = "u" + std::to_string(i);
    gold[id] = {lat(rng), lon(rng)};
    preds.push_back({id, i % 9 == 0 ? std::nullopt : std::optional<GeoPoint>(GeoPoint{lat(rng), lon(rng)})});
  }
  const auto base = evaluate(preds, gold);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(preds.begin(), preds.end(), rng);
    const auto r = evaluate(preds, gold);
    CHECK(r.acc161 == base.acc161);
    CHECK(r.median_km == base.median_km);
    CHECK(r.mean_km == doctest::Approx(base.mean_km).epsilon(1e-12));
    CHECK(r.coverage == base.coverage);
  }
  auto even = [](const std::string& id) { return std::stoi(id.substr(1)) % 2 == 0; };
  std::vector<Prediction> only_even;
  for (const auto& p : preds) {
    if (even(p.user_id)) only_even.push_back(p);
  }
  const auto sub = evaluate_subset(preds, gold, even);
  const auto direct = evaluate(only_even, gold);
  CHECK(sub.n == direct.n);
  CHECK(sub.total == direct.total);
  CHECK(sub.median_km == direct.median_km);
  CHECK(sub.mean_km == direct.mean_km);
}

TEST_CASE("lower median for an even count") {
  const GoldMap gold = {{"a", {0, 0}}, {"b", {0, 0}}, {"c", {0, 0}}, {"d", {0, 0}}};
  const std::vector<Prediction> p = {
      {"a", GeoPoint{0, 1}}, {"b", GeoPoint{0, 2}}, {"c", GeoPoint{0, 3}}, {"d", GeoPoint{0, 4}}};
  CHECK(evaluate(p, gold).median_km == haversine_km({0, 0}, {0, 2}));
}

TEST_CASE("reports use the documented keys") {
  EvalReport r{0.5, 10.0, 2.0, 0.75, 3, 4};
  const auto doc = nlohmann::json::parse(report_json(r));
  CHECK(doc.at("acc161") == 0.5);
  CHECK(doc.at("mean_km") == 10.0);
  CHECK(doc.at("median_km") == 2.0);
  CHECK(doc.at("coverage") == 0.75);
  CHECK(doc.at("n") == 3);
  EvalBreakdown b{r, r, std::nullopt};
  const auto full = nlohmann::json::parse(breakdown_json(b, "lp"));
  CHECK(full.at("method") == "lp");
  CHECK(full.contains("connected"));
  CHECK_FALSE(full.contains("disconnected"));
  const auto text = breakdown_text(b, "lp");
  CHECK(text.find("connected") != std::string::npos);
  CHECK(text.find("Acc@161") != std::string::npos);
}

TEST_CASE("prediction files round-trip") {
  const std::vector<Prediction> p = {{"a", GeoPoint{1.25, -2.5}}, {"b", std::nullopt}};
  std::ostringstream out;
  write_predictions(out, p, "lp", "abc");
  CHECK(out.str().starts_with("# geoloc-predictions v1"));
  std::istringstream in(out.str());
  const auto back = read_predictions(in);
  CHECK(back.method == "lp");
  CHECK(back.source_hash == "abc");
  CHECK(back.predictions == p);
}
