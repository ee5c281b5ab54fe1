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


// Drives the geoloc binary end to end.

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using geoloc::testing::slurp;
using geoloc::testing::spit;
using geoloc::testing::TempDir;

namespace {

int geoloc_cli(const std::string& args, const TempDir& dir) {
  const std::string cmd = std::string(GEOLOC_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                          " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

const char* kSynth =
    "synth --users-per-region 40 --dev-fraction 0.2 --test-fraction 0.2 "
    "--isolated-test-fraction 0.3 --mention-density 0.08 --seed 5";

}  // namespace

TEST_CASE("synth is deterministic and writes ground truth") {
  TempDir dir;
  const auto a = dir / "a.tsv", b = dir / "b.tsv", truth = dir / "truth.json";
  REQUIRE(geoloc_cli(std::string(kSynth) + " --output " + a.string() + " --truth " + truth.string(), dir) == 0);
  REQUIRE(geoloc_cli(std::string(kSynth) + " --output " + b.string(), dir) == 0);
  CHECK(slurp(a) == slurp(b));
  const auto doc = nlohmann::json::parse(slurp(truth));
  CHECK(doc.at("region_centres").size() == 4);
  CHECK(doc.at("user_region").size() == 160);
}

TEST_CASE("hybrid on an edgeless graph reproduces the text predictions") {
  TempDir dir;
  const auto data = dir / "quiet.tsv";
  const auto quiet = replace_all(kSynth, "--mention-density 0.08", "--mention-density 0");
  REQUIRE(geoloc_cli(quiet + " --output " + data.string(), dir) == 0);
  const std::string common = " --dataset " + data.string() + " --out " + (dir / "out").string() +
                             " --bucket-size 20 --min-df 3";
  for (const char* stage : {"grid-build", "featurize", "train-lr", "graph-build", "predict --method lr",
                            "predict --method hybrid"}) {
    REQUIRE(geoloc_cli(std::string(stage) + common, dir) == 0);
  }
  const auto lr = slurp(dir / "out" / "predictions.lr.tsv");
  const auto hybrid = slurp(dir / "out" / "predictions.hybrid.tsv");
  REQUIRE_FALSE(lr.empty());
  // Only the method label may differ.
  CHECK(replace_all(replace_all(hybrid, "\thybrid\t", "\tlr\t"), "method=hybrid", "method=lr") == lr);
}

TEST_CASE("full run twice gives identical reports; tune picks the argmin") {
  TempDir dir;
  const auto data = dir / "corpus.tsv";
  REQUIRE(geoloc_cli(std::string(kSynth) + " --output " + data.string(), dir) == 0);
  const std::string common = " --dataset " + data.string() + " --bucket-size 20 --min-df 3";
  REQUIRE(geoloc_cli("run" + common + " --out " + (dir / "one").string(), dir) == 0);
  CHECK(slurp(dir / "stdout.txt").find("method: hybrid") != std::string::npos);
  REQUIRE(geoloc_cli("run" + common + " --out " + (dir / "two").string(), dir) == 0);
  for (const char* f : {"report.lr.json", "report.lp.json", "report.hybrid.json", "predictions.hybrid.tsv",
                        "model.json", "grid.json", "vocab.tsv", "graph.edges.tsv", "graph.nodes.tsv"}) {
    CHECK_MESSAGE(slurp(dir / "one" / f) == slurp(dir / "two" / f), f);
  }
  const auto report = nlohmann::json::parse(slurp(dir / "one" / "report.hybrid.json"));
  CHECK(report.at("coverage") == 1.0);
  for (const char* key : {"acc161", "mean_km", "median_km", "coverage", "n"}) CHECK(report.contains(key));

  const std::string tune = "tune" + common + " --out " + (dir / "tune").string() +
                           " --tune-buckets 300 600 --tune-l1 0.0001 0.001";
  REQUIRE(geoloc_cli(tune, dir) == 0);
  const auto first = slurp(dir / "tune" / "tune.json");
  REQUIRE(geoloc_cli(tune, dir) == 0);
  CHECK(slurp(dir / "tune" / "tune.json") == first);
  const auto doc = nlohmann::json::parse(first);
  REQUIRE(doc.at("trials").size() == 4);
  double lowest = 1e300;
  for (const auto& t : doc.at("trials")) lowest = std::min(lowest, t.at("dev").at("median_km").get<double>());
  CHECK(doc.at("best").at("dev_median_km").get<double>() == lowest);
}

TEST_CASE("config files are honoured and explicit flags win") {
  TempDir dir;
  const auto data = dir / "corpus.tsv";
  REQUIRE(geoloc_cli(std::string(kSynth) + " --output " + data.string(), dir) == 0);
  const auto out = dir / "out";
  spit(dir / "cfg.json", "{\"dataset\": \"" + data.string() + "\", \"output_dir\": \"" + out.string() +
                             "\", \"bucket_size\": 25, \"min_df\": 3, \"lp_schedule\": \"synchronous\"}");
  REQUIRE(geoloc_cli("grid-build --config " + (dir / "cfg.json").string() + " --bucket-size 15", dir) == 0);
  const auto saved = nlohmann::json::parse(slurp(out / "run_config.json"));
  CHECK(saved.at("bucket_size") == 15);
  CHECK(saved.at("min_df") == 3);
  CHECK(saved.at("lp_schedule") == "synchronous");
  CHECK(nlohmann::json::parse(slurp(out / "grid.json")).at("bucket_size") == 15);
}

TEST_CASE("failures exit nonzero with a message") {
  TempDir dir;
  const auto data = dir / "corpus.tsv";
  REQUIRE(geoloc_cli(std::string(kSynth) + " --output " + data.string(), dir) == 0);
  const std::string common = " --dataset " + data.string() + " --out " + (dir / "out").string();
  CHECK(geoloc_cli("train-lr" + common, dir) != 0);
  CHECK(slurp(dir / "stderr.txt").find("grid-build") != std::string::npos);
  CHECK(geoloc_cli("predict --method nearest" + common, dir) != 0);
  CHECK(geoloc_cli("frobnicate", dir) != 0);
  spit(dir / "bad.tsv", "u1\t95\t0\ttrain\ttext\n");
  CHECK(geoloc_cli("grid-build --dataset " + (dir / "bad.tsv").string() + " --out " + (dir / "o2").string(), dir) != 0);
  CHECK(slurp(dir / "stderr.txt").find("line 1") != std::string::npos);
  CHECK(geoloc_cli("grid-build --bucket-size 0" + common, dir) != 0);
}
