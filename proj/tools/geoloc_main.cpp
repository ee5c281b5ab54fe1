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

// geoloc: batch driver for the user-geolocation pipeline.
//
//   geoloc synth --output corpus.tsv --seed 7
//   geoloc run --dataset corpus.tsv --out out/ --bucket-size 50 --min-df 5
//   geoloc predict --method hybrid --config out/run_config.json

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "geoloc/pipeline.hpp"
#include "geoloc/synth.hpp"
#include "geoloc/text_io.hpp"

namespace {

using geoloc::RunConfig;

struct Flags {
  std::string config_path;
  std::string dataset;
  std::string format;
  std::string out;
  std::size_t bucket_size = 0;
  std::size_t min_df = 0;
  double l1 = 0.0;
  double step = 0.0;
  std::size_t max_epochs = 0;
  double tolerance = 0.0;
  std::size_t lp_max_iters = 0;
  double lp_tol_km = 0.0;
  std::string lp_schedule;
  std::uint64_t seed = 0;
  std::vector<std::size_t> tune_buckets;
  std::vector<double> tune_l1;
  bool allow_nonconvergence = false;
};

struct Bound {
  CLI::Option* dataset;
  CLI::Option* format;
  CLI::Option* out;
  CLI::Option* bucket_size;
  CLI::Option* min_df;
  CLI::Option* l1;
  CLI::Option* step;
  CLI::Option* max_epochs;
  CLI::Option* tolerance;
  CLI::Option* lp_max_iters;
  CLI::Option* lp_tol_km;
  CLI::Option* lp_schedule;
  CLI::Option* seed;
  CLI::Option* tune_buckets;
  CLI::Option* tune_l1;
  CLI::Option* allow_nonconvergence;
};

Bound bind_run_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_path, "JSON run config; explicit flags override it");
  return Bound{
      app.add_option("--dataset", f.dataset, "Dataset file (TSV or JSONL)"),
      app.add_option("--format", f.format, "Dataset format")->check(CLI::IsMember({"auto", "tsv", "jsonl"})),
      app.add_option("--out", f.out, "Output directory for artifacts"),
      app.add_option("--bucket-size", f.bucket_size, "Max training users per k-d leaf")->check(CLI::PositiveNumber),
      app.add_option("--min-df", f.min_df, "Minimum document frequency for features")->check(CLI::PositiveNumber),
      app.add_option("--l1", f.l1, "l1 regularisation strength")->check(CLI::NonNegativeNumber),
      app.add_option("--step", f.step, "Proximal gradient step size")->check(CLI::PositiveNumber),
      app.add_option("--max-epochs", f.max_epochs, "Training epoch cap"),
      app.add_option("--tolerance", f.tolerance, "Relative objective decrease to stop at"),
      app.add_option("--lp-max-iters", f.lp_max_iters, "Label propagation iteration cap"),
      app.add_option("--lp-tol-km", f.lp_tol_km, "Propagation convergence threshold (km)")->check(CLI::PositiveNumber),
      app.add_option("--lp-schedule", f.lp_schedule, "Propagation update order")
          ->check(CLI::IsMember({"inplace", "synchronous"})),
      app.add_option("--seed", f.seed, "Seed for every random choice"),
      app.add_option("--tune-buckets", f.tune_buckets, "Bucket sizes searched by tune"),
      app.add_option("--tune-l1", f.tune_l1, "l1 strengths searched by tune"),
      app.add_flag("--allow-nonconvergence", f.allow_nonconvergence,
                   "Return truncated propagation instead of failing"),
  };
}

RunConfig resolve(const Flags& f, const Bound& b) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : RunConfig::load(f.config_path);
  auto set = [](CLI::Option* opt) { return opt->count() > 0; };
  if (set(b.dataset)) c.dataset = f.dataset;
  if (set(b.format)) c.format = f.format;
  if (set(b.out)) c.output_dir = f.out;
  if (set(b.bucket_size)) c.bucket_size = f.bucket_size;
  if (set(b.min_df)) c.min_df = f.min_df;
  if (set(b.l1)) c.l1 = f.l1;
  if (set(b.step)) c.train.step = f.step;
  if (set(b.max_epochs)) c.train.max_epochs = f.max_epochs;
  if (set(b.tolerance)) c.train.tolerance = f.tolerance;
  if (set(b.lp_max_iters)) c.lp.max_iters = f.lp_max_iters;
  if (set(b.lp_tol_km)) c.lp.tol_km = f.lp_tol_km;
  if (set(b.lp_schedule)) c.lp.schedule = *geoloc::parse_schedule(f.lp_schedule);
  if (set(b.seed)) c.seed = f.seed;
  if (set(b.tune_buckets)) c.tune_bucket_sizes = f.tune_buckets;
  if (set(b.tune_l1)) c.tune_l1 = f.tune_l1;
  if (set(b.allow_nonconvergence)) c.lp.require_convergence = !f.allow_nonconvergence;
  c.train.seed = c.seed;
  return c;
}

void print_breakdown(const geoloc::EvalBreakdown& b, geoloc::Method m) {
  std::cout << geoloc::breakdown_text(b, geoloc::to_string(m));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-media user geolocation: k-d grid text classifier, mention-graph "
               "label propagation, and their hybrid"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  const Bound bound = bind_run_flags(app, flags);

  auto* grid_cmd = app.add_subcommand("grid-build", "Partition training locations into k-d regions");
  auto* feat_cmd = app.add_subcommand("featurize", "Fit the tf-idf vocabulary on training users");
  auto* train_cmd = app.add_subcommand("train-lr", "Train the l1 logistic regression over regions");
  auto* graph_cmd = app.add_subcommand("graph-build", "Build the @-mention graph");

  std::string method_name;
  auto* predict_cmd = app.add_subcommand("predict", "Geolocate test users");
  predict_cmd->add_option("--method", method_name, "lr | lp | hybrid")
      ->required()
      ->check(CLI::IsMember({"lr", "lp", "hybrid"}));
  std::string eval_method;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold test locations");
  eval_cmd->add_option("--method", eval_method, "lr | lp | hybrid")
      ->required()
      ->check(CLI::IsMember({"lr", "lp", "hybrid"}));
  auto* tune_cmd = app.add_subcommand("tune", "Dev-set grid search over bucket size and l1");
  auto* run_cmd = app.add_subcommand("run", "All stages and all three methods");

  geoloc::SynthConfig synth;
  std::string synth_output;
  std::string synth_truth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth_cmd->add_option("--output", synth_output, "Dataset file to write")->required();
  synth_cmd->add_option("--truth", synth_truth, "Optional JSON with generating centres");
  synth_cmd->add_option("--regions", synth.num_regions)->capture_default_str();
  synth_cmd->add_option("--users-per-region", synth.users_per_region)->capture_default_str();
  synth_cmd->add_option("--vocab-per-region", synth.vocab_per_region)->capture_default_str();
  synth_cmd->add_option("--mention-density", synth.mention_density)->capture_default_str();
  synth_cmd->add_option("--dev-fraction", synth.dev_fraction)->capture_default_str();
  synth_cmd->add_option("--test-fraction", synth.test_fraction)->capture_default_str();
  synth_cmd->add_option("--isolated-test-fraction", synth.isolated_test_fraction)->capture_default_str();
  synth_cmd->add_option("--within-region-prob", synth.within_region_prob)->capture_default_str();
  synth_cmd->add_option("--external-prob", synth.external_prob)->capture_default_str();
  synth_cmd->add_option("--communities-per-region", synth.communities_per_region)->capture_default_str();
  synth_cmd->add_option("--community-prob", synth.community_prob)->capture_default_str();
  synth_cmd->add_option("--user-spread-km", synth.user_spread_km)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = resolve(flags, bound);
    if (*grid_cmd) {
      const auto grid = geoloc::stage_grid_build(config);
      std::cout << "grid: " << grid.num_regions() << " regions (bucket size " << grid.bucket_size() << ")\n";
    } else if (*feat_cmd) {
      const auto vocab = geoloc::stage_featurize(config);
      std::cout << "vocabulary: " << vocab.size() << " features over " << vocab.num_documents()
                << " training users (min_df " << vocab.min_df() << ")\n";
    } else if (*train_cmd) {
      const auto model = geoloc::stage_train_lr(config);
      std::cout << "model: " << model.info.epochs << " epochs, objective "
                << geoloc::format_double(model.info.final_objective) << ", sparsity "
                << geoloc::format_double(model.sparsity()) << "\n";
    } else if (*graph_cmd) {
      const auto graph = geoloc::stage_graph_build(config);
      const auto s = graph.stats();
      std::cout << "graph: " << s.nodes() << " nodes (" << s.train_nodes << " train, " << s.dev_nodes
                << " dev, " << s.test_nodes << " test, " << s.external_nodes << " external), "
                << s.edges << " edges, " << s.total_mentions << " mentions; disconnected test fraction "
                << geoloc::format_double(geoloc::disconnected_test_fraction(graph)) << "\n";
    } else if (*predict_cmd) {
      const auto method = *geoloc::parse_method(method_name);
      const auto preds = geoloc::stage_predict(config, method);
      std::size_t located = 0;
      for (const auto& p : preds) located += p.location ? 1 : 0;
      std::cout << method_name << ": located " << located << " of " << preds.size() << " test users\n";
    } else if (*eval_cmd) {
      const auto method = *geoloc::parse_method(eval_method);
      print_breakdown(geoloc::stage_evaluate(config, method), method);
    } else if (*tune_cmd) {
      const auto result = geoloc::stage_tune(config);
      for (const auto& t : result.trials) {
        std::cout << "bucket " << t.bucket_size << " l1 " << geoloc::format_double(t.l1) << " regions "
                  << t.regions << " dev median " << geoloc::format_double(t.dev.median_km) << " km\n";
      }
      const auto& best = result.trials[result.best];
      std::cout << "best: bucket " << best.bucket_size << " l1 " << geoloc::format_double(best.l1) << "\n";
    } else if (*run_cmd) {
      geoloc::stage_run_all(config);
      for (const auto m : {geoloc::Method::kLr, geoloc::Method::kLp, geoloc::Method::kHybrid}) {
        std::ifstream in(geoloc::ArtifactPaths(config.output_dir).report_text(m));
        std::cout << in.rdbuf();
      }
    } else if (*synth_cmd) {
      synth.seed = config.seed;
      const auto corpus = geoloc::synthesize(synth);
      geoloc::save_dataset(synth_output, corpus.dataset);
      if (!synth_truth.empty()) {
        nlohmann::ordered_json truth;
        truth["seed"] = synth.seed;
        truth["region_centres"] = nlohmann::ordered_json::array();
        for (const auto& c : corpus.region_centres) truth["region_centres"].push_back({c.lat, c.lon});
        auto& users = truth["user_region"] = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < corpus.dataset.records.size(); ++i) {
          users[corpus.dataset.records[i].user_id] = corpus.user_region[i];
        }
        std::ofstream(synth_truth) << truth.dump(2) << "\n";
      }
      std::cout << "wrote " << corpus.dataset.records.size() << " users to " << synth_output << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
