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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoloc/geo.hpp"

namespace geoloc {

enum class Split { kTrain, kDev, kTest };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view name);

// One user: the concatenation of their posts plus a single gold location.
struct UserRecord {
  std::string user_id;
  std::string text;
  GeoPoint location;
  Split split = Split::kTrain;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct Dataset {
  std::string name;
  std::vector<UserRecord> records;

  std::vector<const UserRecord*> of_split(Split split) const;
  std::size_t count(Split split) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DatasetFormat { kTsv, kJsonl };

// ".jsonl" / ".json" select JSONL; anything else is TSV.
DatasetFormat format_from_path(const std::filesystem::path& path);
std::optional<DatasetFormat> parse_format(std::string_view name);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::size_t line, const std::string& what);
  explicit DatasetError(const std::string& what);

  // 1-based line of the offending record, 0 when not line-specific.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// Checks non-empty, unique user ids and valid coordinates.
void validate(const Dataset& dataset);

// TSV rows are `user_id \t lat \t lon \t split \t text`; blank lines and
// lines starting with '#' are skipped.
Dataset read_dataset(std::istream& in, DatasetFormat format, std::string name = {});
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<DatasetFormat> format = std::nullopt);

void write_dataset(std::ostream& out, const Dataset& dataset, DatasetFormat format);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset,
                  std::optional<DatasetFormat> format = std::nullopt);

// SHA-256 of the canonical TSV serialization; identifies the dataset in
// downstream artifacts.
std::string dataset_hash(const Dataset& dataset);

}  // namespace geoloc
