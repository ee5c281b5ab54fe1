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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoloc/corpus.hpp"
#include "geoloc/eval.hpp"
#include "geoloc/features.hpp"
#include "geoloc/graph.hpp"
#include "geoloc/grid.hpp"
#include "geoloc/propagation.hpp"
#include "geoloc/textmodel.hpp"

namespace geoloc {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a run depends on. Persisted next to the artifacts so a run
// can be repeated exactly.
struct RunConfig {
  std::string dataset;
  std::string format = "auto";  // auto | tsv | jsonl
  std::size_t bucket_size = 300;
  std::size_t min_df = 10;
  double l1 = 1e-4;
  TrainOptions train;
  PropagationOptions lp;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<std::size_t> tune_bucket_sizes = {300, 600, 900, 1200};
  std::vector<double> tune_l1 = {1e-5, 1e-4, 1e-3};

  std::string to_json() const;
  static RunConfig from_json(std::string_view json);
  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_json() == b.to_json(); }
};

enum class Method { kLr, kLp, kHybrid };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

// File layout inside RunConfig::output_dir.
struct ArtifactPaths {
  std::filesystem::path dir;

  explicit ArtifactPaths(std::filesystem::path out) : dir(std::move(out)) {}
  std::filesystem::path config() const { return dir / "run_config.json"; }
  std::filesystem::path grid() const { return dir / "grid.json"; }
  std::filesystem::path vocab() const { return dir / "vocab.tsv"; }
  std::filesystem::path model() const { return dir / "model.json"; }
  std::filesystem::path graph_edges() const { return dir / "graph.edges.tsv"; }
  std::filesystem::path graph_nodes() const { return dir / "graph.nodes.tsv"; }
  std::filesystem::path predictions(Method m) const;
  std::filesystem::path report_json(Method m) const;
  std::filesystem::path report_text(Method m) const;
  std::filesystem::path tune() const { return dir / "tune.json"; }
};

// In-memory building blocks.
std::vector<GridPoint> train_points(const Dataset& dataset);
KdTreeGrid build_grid(const Dataset& dataset, std::size_t bucket_size);
Vocabulary fit_vocabulary(const Dataset& dataset, std::size_t min_df);
LinearModel fit_lr(const Dataset& dataset, const KdTreeGrid& grid, const Vocabulary& vocab,
                   double l1, const TrainOptions& opts);
// Overall metrics plus the connected/disconnected split when a graph is
// given. Methods that locate nobody yield an EvalReport with n = 0.
EvalBreakdown evaluate_breakdown(const std::vector<Prediction>& predictions, const GoldMap& gold,
                                 const MentionGraph* graph);

struct TuneTrial {
  std::size_t bucket_size = 0;
  double l1 = 0.0;
  std::size_t regions = 0;
  EvalReport dev;
};

struct TuneResult {
  std::vector<TuneTrial> trials;
  std::size_t best = 0;  // index into trials
};

// Grid search over bucket sizes and l1 strengths, scored by dev-set median
// error of the text model; ties keep the earliest trial.
TuneResult tune(const Dataset& dataset, const RunConfig& config);

// Stage drivers. Each reads the dataset named by the config, checks the
// upstream artifacts against it and writes its own artifact.
Dataset load_config_dataset(const RunConfig& config);
KdTreeGrid stage_grid_build(const RunConfig& config);
Vocabulary stage_featurize(const RunConfig& config);
LinearModel stage_train_lr(const RunConfig& config);
MentionGraph stage_graph_build(const RunConfig& config);
std::vector<Prediction> stage_predict(const RunConfig& config, Method method);
EvalBreakdown stage_evaluate(const RunConfig& config, Method method);
TuneResult stage_tune(const RunConfig& config);
// All of the above except tuning, for all three methods.
void stage_run_all(const RunConfig& config);

}  // namespace geoloc
