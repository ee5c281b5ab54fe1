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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoloc {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict parse of the whole field; nullopt on trailing junk, empty input
// or a non-finite value.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

// Backslash escaping for tab-separated fields: \t, \n, \r and \\ itself.
std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

std::vector<std::string_view> split_tabs(std::string_view line);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace geoloc
