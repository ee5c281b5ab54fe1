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

#include "geoloc/pipeline.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>

namespace geoloc {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write '" + path.string() + "'");
  out << content;
}

void require(const std::filesystem::path& path, std::string_view producer) {
  if (!std::filesystem::exists(path)) {
    throw PipelineError("missing artifact '" + path.string() + "'; run `" + std::string(producer) +
                        "` first");
  }
}

void check_source(std::string_view artifact, const std::string& recorded, const std::string& expected,
                  std::string_view producer) {
  if (recorded != expected) {
    throw PipelineError(std::string(artifact) + " was built from different inputs (" +
                        (recorded.empty() ? "unknown" : recorded.substr(0, 12)) + " vs " +
                        expected.substr(0, 12) + "); rerun `" + std::string(producer) + "`");
  }
}

ArtifactPaths prepare(const RunConfig& config) {
  ArtifactPaths paths(config.output_dir);
  std::filesystem::create_directories(paths.dir);
  config.save(paths.config());
  return paths;
}

KdTreeGrid load_grid(const ArtifactPaths& paths, const std::string& data_hash) {
  require(paths.grid(), "grid-build");
  auto grid = KdTreeGrid::load(paths.grid());
  check_source("grid.json", grid.source_hash(), data_hash, "grid-build");
  return grid;
}

Vocabulary load_vocab(const ArtifactPaths& paths, const std::string& data_hash) {
  require(paths.vocab(), "featurize");
  auto vocab = Vocabulary::load(paths.vocab());
  check_source("vocab.tsv", vocab.source_hash(), data_hash, "featurize");
  return vocab;
}

MentionGraph load_graph(const ArtifactPaths& paths, const std::string& data_hash) {
  require(paths.graph_edges(), "graph-build");
  require(paths.graph_nodes(), "graph-build");
  auto graph = MentionGraph::load(paths.graph_edges(), paths.graph_nodes());
  check_source("mention graph", graph.source_hash(), data_hash, "graph-build");
  return graph;
}

LinearModel load_model(const ArtifactPaths& paths, const KdTreeGrid& grid, const Vocabulary& vocab) {
  require(paths.model(), "train-lr");
  auto model = LinearModel::load(paths.model());
  check_source("model.json (grid)", model.grid_hash, grid.hash(), "train-lr");
  check_source("model.json (vocabulary)", model.vocab_hash, vocab.hash(), "train-lr");
  return model;
}

nlohmann::ordered_json report_or_null(const EvalReport& r) {
  if (r.n == 0) {
    return {{"acc161", nullptr}, {"mean_km", nullptr}, {"median_km", nullptr},
            {"coverage", r.coverage}, {"n", 0}};
  }
  return nlohmann::ordered_json::parse(report_json(r));
}

}  // namespace

std::string RunConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["dataset"] = dataset;
  doc["format"] = format;
  doc["bucket_size"] = bucket_size;
  doc["min_df"] = min_df;
  doc["l1"] = l1;
  doc["step"] = train.step;
  doc["max_epochs"] = train.max_epochs;
  doc["tolerance"] = train.tolerance;
  doc["lp_schedule"] = to_string(lp.schedule);
  doc["lp_max_iters"] = lp.max_iters;
  doc["lp_tol_km"] = lp.tol_km;
  doc["lp_require_convergence"] = lp.require_convergence;
  doc["output_dir"] = output_dir;
  doc["seed"] = seed;
  doc["tune_bucket_sizes"] = tune_bucket_sizes;
  doc["tune_l1"] = tune_l1;
  return doc.dump(2) + "\n";
}

RunConfig RunConfig::from_json(std::string_view json) {
  RunConfig c;
  try {
    const auto doc = nlohmann::json::parse(json);
    c.dataset = doc.value("dataset", c.dataset);
    c.format = doc.value("format", c.format);
    c.bucket_size = doc.value("bucket_size", c.bucket_size);
    c.min_df = doc.value("min_df", c.min_df);
    c.l1 = doc.value("l1", c.l1);
    c.train.step = doc.value("step", c.train.step);
    c.train.max_epochs = doc.value("max_epochs", c.train.max_epochs);
    c.train.tolerance = doc.value("tolerance", c.train.tolerance);
    if (doc.contains("lp_schedule")) {
      const auto schedule = parse_schedule(doc.at("lp_schedule").get<std::string>());
      if (!schedule) throw PipelineError("unknown lp_schedule in run config");
      c.lp.schedule = *schedule;
    }
    c.lp.max_iters = doc.value("lp_max_iters", c.lp.max_iters);
    c.lp.tol_km = doc.value("lp_tol_km", c.lp.tol_km);
    c.lp.require_convergence = doc.value("lp_require_convergence", c.lp.require_convergence);
    c.output_dir = doc.value("output_dir", c.output_dir);
    c.seed = doc.value("seed", c.seed);
    c.tune_bucket_sizes = doc.value("tune_bucket_sizes", c.tune_bucket_sizes);
    c.tune_l1 = doc.value("tune_l1", c.tune_l1);
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(std::string("malformed run config: ") + e.what());
  }
  c.train.seed = c.seed;
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

void RunConfig::save(const std::filesystem::path& path) const { write_file(path, to_json()); }

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kLr: return "lr";
    case Method::kLp: return "lp";
    case Method::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "lr") return Method::kLr;
  if (name == "lp") return Method::kLp;
  if (name == "hybrid") return Method::kHybrid;
  return std::nullopt;
}

std::filesystem::path ArtifactPaths::predictions(Method m) const {
  return dir / ("predictions." + std::string(to_string(m)) + ".tsv");
}
std::filesystem::path ArtifactPaths::report_json(Method m) const {
  return dir / ("report." + std::string(to_string(m)) + ".json");
}
std::filesystem::path ArtifactPaths::report_text(Method m) const {
  return dir / ("report." + std::string(to_string(m)) + ".txt");
}

std::vector<GridPoint> train_points(const Dataset& dataset) {
  std::vector<GridPoint> points;
  for (const auto* rec : dataset.of_split(Split::kTrain)) points.push_back({rec->user_id, rec->location});
  return points;
}

KdTreeGrid build_grid(const Dataset& dataset, std::size_t bucket_size) {
  const auto points = train_points(dataset);
  if (points.empty()) throw PipelineError("dataset has no training users");
  auto grid = KdTreeGrid::build(points, bucket_size);
  grid.set_source_hash(dataset_hash(dataset));
  return grid;
}

Vocabulary fit_vocabulary(const Dataset& dataset, std::size_t min_df) {
  std::vector<std::string> docs;
  for (const auto* rec : dataset.of_split(Split::kTrain)) docs.push_back(rec->text);
  if (docs.empty()) throw PipelineError("dataset has no training users");
  auto vocab = Vocabulary::fit(docs, min_df);
  vocab.set_source_hash(dataset_hash(dataset));
  return vocab;
}

LinearModel fit_lr(const Dataset& dataset, const KdTreeGrid& grid, const Vocabulary& vocab,
                   double l1, const TrainOptions& opts) {
  std::vector<SparseVector> xs;
  std::vector<int> ys;
  for (const auto* rec : dataset.of_split(Split::kTrain)) {
    xs.push_back(transform(rec->text, vocab));
    ys.push_back(grid.assign(rec->location));
  }
  if (xs.empty()) throw PipelineError("dataset has no training users");
  auto model = train(xs, ys, grid.num_regions(), l1, opts);
  model.grid_hash = grid.hash();
  model.vocab_hash = vocab.hash();
  return model;
}

EvalBreakdown evaluate_breakdown(const std::vector<Prediction>& predictions, const GoldMap& gold,
                                 const MentionGraph* graph) {
  auto safe = [&](const std::function<bool(const std::string&)>& include) {
    try {
      return evaluate_subset(predictions, gold, include);
    } catch (const EvalError&) {
      EvalReport empty;
      for (const auto& p : predictions) empty.total += (!include || include(p.user_id)) ? 1 : 0;
      return empty;
    }
  };
  EvalBreakdown out;
  out.overall = safe({});
  if (graph != nullptr) {
    const auto reached = graph->connected_to_train();
    auto connected = [&](const std::string& user) {
      const auto id = graph->find(user);
      return id && reached[*id];
    };
    const auto c = safe(connected);
    const auto d = safe([&](const std::string& u) { return !connected(u); });
    if (c.total > 0) out.connected = c;
    if (d.total > 0) out.disconnected = d;
  }
  return out;
}

TuneResult tune(const Dataset& dataset, const RunConfig& config) {
  if (config.tune_bucket_sizes.empty() || config.tune_l1.empty()) {
    throw PipelineError("tune needs at least one bucket size and one l1 value");
  }
  if (dataset.count(Split::kDev) == 0) throw PipelineError("tune needs dev users");
  const auto vocab = fit_vocabulary(dataset, config.min_df);
  const auto gold = gold_locations(dataset, Split::kDev);
  TuneResult result;
  for (const std::size_t bucket : config.tune_bucket_sizes) {
    const auto grid = build_grid(dataset, bucket);
    for (const double l1 : config.tune_l1) {
      const auto model = fit_lr(dataset, grid, vocab, l1, config.train);
      const auto run = run_lr(dataset, model, grid, vocab, Split::kDev);
      TuneTrial trial{bucket, l1, grid.num_regions(), evaluate(run.predictions, gold)};
      if (!result.trials.empty() && trial.dev.median_km < result.trials[result.best].dev.median_km) {
        result.best = result.trials.size();
      }
      result.trials.push_back(trial);
    }
  }
  return result;
}

Dataset load_config_dataset(const RunConfig& config) {
  if (config.dataset.empty()) throw PipelineError("no dataset given");
  std::optional<DatasetFormat> format;
  if (config.format != "auto") {
    format = parse_format(config.format);
    if (!format) throw PipelineError("unknown dataset format '" + config.format + "'");
  }
  auto dataset = load_dataset(config.dataset, format);
  validate(dataset);
  return dataset;
}

KdTreeGrid stage_grid_build(const RunConfig& config) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  auto grid = build_grid(dataset, config.bucket_size);
  grid.save(paths.grid());
  return grid;
}

Vocabulary stage_featurize(const RunConfig& config) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  auto vocab = fit_vocabulary(dataset, config.min_df);
  vocab.save(paths.vocab());
  return vocab;
}

LinearModel stage_train_lr(const RunConfig& config) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  const auto data_hash = dataset_hash(dataset);
  const auto grid = load_grid(paths, data_hash);
  const auto vocab = load_vocab(paths, data_hash);
  auto model = fit_lr(dataset, grid, vocab, config.l1, config.train);
  model.save(paths.model());
  return model;
}

MentionGraph stage_graph_build(const RunConfig& config) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  auto graph = MentionGraph::build(dataset);
  graph.save(paths.graph_edges(), paths.graph_nodes());
  return graph;
}

std::vector<Prediction> stage_predict(const RunConfig& config, Method method) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  const auto data_hash = dataset_hash(dataset);
  MethodRun run;
  if (method == Method::kLp) {
    run = run_lp(load_graph(paths, data_hash), dataset, config.lp);
  } else {
    const auto grid = load_grid(paths, data_hash);
    const auto vocab = load_vocab(paths, data_hash);
    const auto model = load_model(paths, grid, vocab);
    run = method == Method::kLr
              ? run_lr(dataset, model, grid, vocab)
              : run_hybrid(load_graph(paths, data_hash), dataset, model, grid, vocab, config.lp);
  }
  std::ofstream out(paths.predictions(method), std::ios::binary);
  if (!out) throw PipelineError("cannot write predictions");
  write_predictions(out, run.predictions, std::string(to_string(method)), data_hash);
  return run.predictions;
}

EvalBreakdown stage_evaluate(const RunConfig& config, Method method) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  const auto data_hash = dataset_hash(dataset);
  require(paths.predictions(method), "predict --method " + std::string(to_string(method)));
  std::ifstream in(paths.predictions(method), std::ios::binary);
  const auto file = read_predictions(in);
  check_source(paths.predictions(method).filename().string(), file.source_hash, data_hash,
               "predict --method " + std::string(to_string(method)));

  std::optional<MentionGraph> graph;
  if (std::filesystem::exists(paths.graph_edges()) && std::filesystem::exists(paths.graph_nodes())) {
    graph = load_graph(paths, data_hash);
  }
  const auto gold = gold_locations(dataset, Split::kTest);
  const auto breakdown = evaluate_breakdown(file.predictions, gold, graph ? &*graph : nullptr);
  if (breakdown.overall.n == 0 && method != Method::kLp) {
    throw EvalError("no located predictions to evaluate");
  }

  nlohmann::ordered_json doc = report_or_null(breakdown.overall);
  doc["method"] = to_string(method);
  if (breakdown.connected) doc["connected"] = report_or_null(*breakdown.connected);
  if (breakdown.disconnected) doc["disconnected"] = report_or_null(*breakdown.disconnected);
  write_file(paths.report_json(method), doc.dump(2) + "\n");
  write_file(paths.report_text(method), breakdown_text(breakdown, to_string(method)));
  return breakdown;
}

TuneResult stage_tune(const RunConfig& config) {
  const auto dataset = load_config_dataset(config);
  const auto paths = prepare(config);
  const auto result = tune(dataset, config);
  nlohmann::ordered_json doc;
  doc["source"] = dataset_hash(dataset);
  auto& trials = doc["trials"] = nlohmann::ordered_json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"bucket_size", t.bucket_size},
                      {"l1", t.l1},
                      {"regions", t.regions},
                      {"dev", nlohmann::ordered_json::parse(report_json(t.dev))}});
  }
  const auto& best = result.trials[result.best];
  doc["best"] = {{"bucket_size", best.bucket_size}, {"l1", best.l1}, {"dev_median_km", best.dev.median_km}};
  write_file(paths.tune(), doc.dump(2) + "\n");
  return result;
}

void stage_run_all(const RunConfig& config) {
  stage_grid_build(config);
  stage_featurize(config);
  stage_train_lr(config);
  stage_graph_build(config);
  for (const Method m : {Method::kLr, Method::kLp, Method::kHybrid}) {
    stage_predict(config, m);
    stage_evaluate(config, m);
  }
}

}  // namespace geoloc
