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
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "geoloc/text_io.hpp"

TEST_CASE("doubles round-trip through their shortest text form") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-180.0, 180.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng);
    CHECK(*geoloc::parse_double(geoloc::format_double(v)) == v);
  }
  CHECK(geoloc::format_double(0.5) == "0.5");
  CHECK(geoloc::format_double(-74.006) == "-74.006");
}

TEST_CASE("numeric parsing rejects junk") {
  CHECK_FALSE(geoloc::parse_double("").has_value());
  CHECK_FALSE(geoloc::parse_double("1.5x").has_value());
  CHECK_FALSE(geoloc::parse_double("nan").has_value());
  CHECK(*geoloc::parse_int("42") == 42);
  CHECK_FALSE(geoloc::parse_int("4.2").has_value());
}

TEST_CASE("field escaping round-trips") {
  const std::string raw = "tab\there\nnew line \\ back\rslash";
  const auto escaped = geoloc::escape_field(raw);
  CHECK(escaped.find('\t') == std::string::npos);
  CHECK(escaped.find('\n') == std::string::npos);
  CHECK(geoloc::unescape_field(escaped) == raw);
  CHECK(geoloc::escape_field("a\tb") == "a\\tb");
}

TEST_CASE("tab splitting keeps empty fields") {
  const auto f = geoloc::split_tabs("a\t\tc");
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());
}

TEST_CASE("sha256 known answer") {
  CHECK(geoloc::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
