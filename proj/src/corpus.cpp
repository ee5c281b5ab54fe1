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

#include "geoloc/corpus.hpp"

#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

std::string line_prefix(std::size_t line) {
  return line == 0 ? std::string{} : "line " + std::to_string(line) + ": ";
}

void check_coordinates(std::size_t line, std::optional<double> lat, std::optional<double> lon) {
  if (!lat || !lon) throw DatasetError(line, "missing or malformed coordinates");
  if (!std::isfinite(*lat) || *lat < -90.0 || *lat > 90.0) {
    throw DatasetError(line, "latitude " + format_double(*lat) + " out of range [-90, 90]");
  }
  if (!std::isfinite(*lon) || *lon < -180.0 || *lon > 180.0) {
    throw DatasetError(line, "longitude " + format_double(*lon) + " out of range [-180, 180]");
  }
}

UserRecord parse_tsv_line(std::string_view line, std::size_t lineno) {
  const auto fields = split_tabs(line);
  if (fields.size() != 5) {
    throw DatasetError(lineno, "expected 5 tab-separated fields, found " +
                                   std::to_string(fields.size()));
  }
  UserRecord rec;
  rec.user_id = unescape_field(fields[0]);
  if (rec.user_id.empty()) throw DatasetError(lineno, "empty user_id");
  const auto lat = parse_double(fields[1]);
  const auto lon = parse_double(fields[2]);
  check_coordinates(lineno, lat, lon);
  rec.location = {*lat, *lon};
  const auto split = parse_split(fields[3]);
  if (!split) throw DatasetError(lineno, "unknown split '" + std::string(fields[3]) + "'");
  rec.split = *split;
  rec.text = unescape_field(fields[4]);
  return rec;
}

UserRecord parse_jsonl_line(std::string_view line, std::size_t lineno) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DatasetError(lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DatasetError(lineno, "expected a JSON object");
  UserRecord rec;
  auto string_field = [&](const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw DatasetError(lineno, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
  };
  auto number_field = [&](const char* key) -> std::optional<double> {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) return std::nullopt;
    return it->get<double>();
  };
  rec.user_id = string_field("user_id");
  if (rec.user_id.empty()) throw DatasetError(lineno, "empty user_id");
  const auto lat = number_field("lat");
  const auto lon = number_field("lon");
  check_coordinates(lineno, lat, lon);
  rec.location = {*lat, *lon};
  const std::string split_name = string_field("split");
  const auto split = parse_split(split_name);
  if (!split) throw DatasetError(lineno, "unknown split '" + split_name + "'");
  rec.split = *split;
  rec.text = obj.contains("text") ? string_field("text") : std::string{};
  return rec;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<const UserRecord*> Dataset::of_split(Split split) const {
  std::vector<const UserRecord*> out;
  for (const auto& rec : records) {
    if (rec.split == split) out.push_back(&rec);
  }
  return out;
}

std::size_t Dataset::count(Split split) const {
  std::size_t n = 0;
  for (const auto& rec : records) n += rec.split == split ? 1 : 0;
  return n;
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? DatasetFormat::kJsonl : DatasetFormat::kTsv;
}

std::optional<DatasetFormat> parse_format(std::string_view name) {
  if (name == "tsv") return DatasetFormat::kTsv;
  if (name == "jsonl") return DatasetFormat::kJsonl;
  return std::nullopt;
}

DatasetError::DatasetError(std::size_t line, const std::string& what)
    : std::runtime_error(line_prefix(line) + what), line_(line) {}

DatasetError::DatasetError(const std::string& what) : std::runtime_error(what) {}

void validate(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& rec = dataset.records[i];
    if (rec.user_id.empty()) throw DatasetError("record " + std::to_string(i) + ": empty user_id");
    if (rec.user_id.front() == '#') {
      throw DatasetError("user '" + rec.user_id + "': user_id may not start with '#'");
    }
    if (!is_valid(rec.location)) {
      throw DatasetError("user '" + rec.user_id + "': invalid location " + to_string(rec.location));
    }
    if (!seen.insert(rec.user_id).second) {
      throw DatasetError("duplicate user_id '" + rec.user_id + "'");
    }
  }
}

Dataset read_dataset(std::istream& in, DatasetFormat format, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    UserRecord rec = format == DatasetFormat::kTsv ? parse_tsv_line(line, lineno)
                                                   : parse_jsonl_line(line, lineno);
    if (!seen.insert(rec.user_id).second) {
      throw DatasetError(lineno, "duplicate user_id '" + rec.user_id + "'");
    }
    dataset.records.push_back(std::move(rec));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<DatasetFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'");
  try {
    return read_dataset(in, format.value_or(format_from_path(path)), path.stem().string());
  } catch (const DatasetError& e) {
    throw DatasetError(e.line(), path.string() + ": " +
                                     std::string(e.what()).substr(line_prefix(e.line()).size()));
  }
}

void write_dataset(std::ostream& out, const Dataset& dataset, DatasetFormat format) {
  for (const auto& rec : dataset.records) {
    if (format == DatasetFormat::kTsv) {
      out << escape_field(rec.user_id) << '\t' << format_double(rec.location.lat) << '\t'
          << format_double(rec.location.lon) << '\t' << to_string(rec.split) << '\t'
          << escape_field(rec.text) << '\n';
    } else {
      nlohmann::ordered_json obj;
      obj["user_id"] = rec.user_id;
      obj["lat"] = rec.location.lat;
      obj["lon"] = rec.location.lon;
      obj["split"] = std::string(to_string(rec.split));
      obj["text"] = rec.text;
      out << obj.dump() << '\n';
    }
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset,
                  std::optional<DatasetFormat> format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset '" + path.string() + "'");
  write_dataset(out, dataset, format.value_or(format_from_path(path)));
}

std::string dataset_hash(const Dataset& dataset) {
  std::ostringstream canonical;
  write_dataset(canonical, dataset, DatasetFormat::kTsv);
  return sha256_hex(canonical.str());
}

}  // namespace geoloc
