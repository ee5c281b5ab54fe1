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

#include "geoloc/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <sstream>

#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

constexpr std::string_view kPredictionsHeader = "# geoloc-predictions v1";

nlohmann::ordered_json to_json(const EvalReport& r) {
  return {{"acc161", r.acc161}, {"mean_km", r.mean_km}, {"median_km", r.median_km},
          {"coverage", r.coverage}, {"n", r.n}};
}

void text_row(std::ostream& out, std::string_view label, const EvalReport& r) {
  out << std::left << std::setw(14) << label << std::right << std::fixed << std::setprecision(1)
      << std::setw(9) << 100.0 * r.acc161 << std::setw(11) << r.mean_km << std::setw(11)
      << r.median_km << std::setw(10) << 100.0 * r.coverage << std::setw(7) << r.n << '\n';
}

}  // namespace

GoldMap gold_locations(const Dataset& dataset, Split split) {
  GoldMap gold;
  for (const auto& rec : dataset.records) {
    if (rec.split == split) gold.emplace(rec.user_id, rec.location);
  }
  return gold;
}

EvalReport evaluate(std::span<const Prediction> predictions, const GoldMap& gold) {
  return evaluate_subset(predictions, gold, {});
}

EvalReport evaluate_subset(std::span<const Prediction> predictions, const GoldMap& gold,
                           const std::function<bool(const std::string&)>& include) {
  std::vector<double> errors;
  std::size_t total = 0;
  for (const auto& p : predictions) {
    if (include && !include(p.user_id)) continue;
    ++total;
    if (!p.location) continue;
    auto it = gold.find(p.user_id);
    if (it == gold.end()) throw EvalError("no gold location for user '" + p.user_id + "'");
    errors.push_back(haversine_km(*p.location, it->second));
  }
  if (errors.empty()) throw EvalError("no located predictions to evaluate");

  EvalReport report;
  report.n = errors.size();
  report.total = total;
  report.coverage = static_cast<double>(errors.size()) / static_cast<double>(total);
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  std::size_t hits = 0;
  for (double e : errors) {
    sum += e;
    if (e < kAccuracyRadiusKm) ++hits;
  }
  report.acc161 = static_cast<double>(hits) / static_cast<double>(errors.size());
  report.mean_km = sum / static_cast<double>(errors.size());
  report.median_km = errors[(errors.size() - 1) / 2];
  return report;
}

std::string report_json(const EvalReport& report) { return to_json(report).dump(); }

std::string breakdown_json(const EvalBreakdown& breakdown, std::string_view method) {
  nlohmann::ordered_json doc = to_json(breakdown.overall);
  doc["method"] = method;
  if (breakdown.connected) doc["connected"] = to_json(*breakdown.connected);
  if (breakdown.disconnected) doc["disconnected"] = to_json(*breakdown.disconnected);
  return doc.dump(2) + "\n";
}

std::string breakdown_text(const EvalBreakdown& breakdown, std::string_view method) {
  std::ostringstream out;
  out << "method: " << method << '\n';
  out << std::left << std::setw(14) << "subset" << std::right << std::setw(9) << "Acc@161"
      << std::setw(11) << "Mean" << std::setw(11) << "Median" << std::setw(10) << "Cover%"
      << std::setw(7) << "n" << '\n';
  text_row(out, "all", breakdown.overall);
  if (breakdown.connected) text_row(out, "connected", *breakdown.connected);
  if (breakdown.disconnected) text_row(out, "disconnected", *breakdown.disconnected);
  return out.str();
}

void write_predictions(std::ostream& out, const std::vector<Prediction>& predictions,
                       const std::string& method, const std::string& source_hash) {
  out << kPredictionsHeader << " method=" << method
      << " source=" << (source_hash.empty() ? "-" : source_hash) << '\n';
  for (const auto& p : predictions) {
    out << escape_field(p.user_id) << '\t';
    if (p.location) {
      out << format_double(p.location->lat) << '\t' << format_double(p.location->lon);
    } else {
      out << '\t';
    }
    out << '\t' << method << '\t' << (p.location ? 1 : 0) << '\n';
  }
}

PredictionFile read_predictions(std::istream& in) {
  PredictionFile file;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kPredictionsHeader)) {
    throw EvalError("prediction file lacks the geoloc header");
  }
  std::istringstream header(line.substr(kPredictionsHeader.size()));
  std::string kv;
  while (header >> kv) {
    if (kv.starts_with("method=")) file.method = kv.substr(7);
    if (kv.starts_with("source=")) file.source_hash = kv.substr(7) == "-" ? "" : kv.substr(7);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 5 || (fields[4] != "0" && fields[4] != "1")) {
      throw EvalError("prediction line " + std::to_string(lineno) + " is malformed");
    }
    Prediction p;
    p.user_id = unescape_field(fields[0]);
    if (fields[4] == "1") {
      const auto lat = parse_double(fields[1]);
      const auto lon = parse_double(fields[2]);
      if (!lat || !lon || !is_valid({*lat, *lon})) {
        throw EvalError("prediction line " + std::to_string(lineno) + " has bad coordinates");
      }
      p.location = GeoPoint{*lat, *lon};
    }
    file.predictions.push_back(std::move(p));
  }
  return file;
}

}  // namespace geoloc
