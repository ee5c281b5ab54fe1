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

#include "geoloc/propagation.hpp"

#include <cmath>
#include <limits>

namespace geoloc {

std::string_view to_string(Schedule schedule) {
  return schedule == Schedule::kInPlace ? "inplace" : "synchronous";
}

std::optional<Schedule> parse_schedule(std::string_view name) {
  if (name == "inplace") return Schedule::kInPlace;
  if (name == "synchronous") return Schedule::kSynchronous;
  return std::nullopt;
}

namespace {

std::vector<NodeLocation> train_seeds(const MentionGraph& graph, const Dataset& dataset) {
  std::vector<NodeLocation> seeds;
  for (const auto& rec : dataset.records) {
    if (rec.split != Split::kTrain) continue;
    const auto id = graph.find(rec.user_id);
    if (!id) throw PropagationError("train user '" + rec.user_id + "' is missing from the graph");
    seeds.push_back({*id, rec.location});
  }
  return seeds;
}

std::vector<Prediction> collect(const MentionGraph& graph, const Dataset& dataset, Split target,
                                const PropagationResult& result) {
  std::vector<Prediction> out;
  for (const auto& rec : dataset.records) {
    if (rec.split != target) continue;
    const auto id = graph.find(rec.user_id);
    if (!id) throw PropagationError("user '" + rec.user_id + "' is missing from the graph");
    out.push_back({rec.user_id, result.locations[*id]});
  }
  return out;
}

}  // namespace

PropagationResult propagate(const MentionGraph& graph, std::span<const NodeLocation> seeds,
                            std::span<const NodeLocation> init, const PropagationOptions& opts,
                            const IterationObserver& observer) {
  if (!(opts.tol_km > 0.0)) throw std::invalid_argument("tol_km must be positive");
  const std::size_t n = graph.num_nodes();
  std::vector<std::optional<GeoPoint>> current(n);
  std::vector<bool> is_seed(n, false);
  for (const auto& s : seeds) {
    if (s.node >= n) throw PropagationError("seed node " + std::to_string(s.node) + " is not in the graph");
    if (!is_valid(s.location)) throw PropagationError("seed node has an invalid location");
    is_seed[s.node] = true;
    current[s.node] = s.location;
  }
  for (const auto& s : init) {
    if (s.node >= n) throw PropagationError("init node " + std::to_string(s.node) + " is not in the graph");
    if (is_seed[s.node]) {
      throw PropagationError("init estimate given for seed node '" + graph.node(s.node).handle + "'");
    }
    current[s.node] = s.location;
  }

  PropagationResult result;
  const bool in_place = opts.schedule == Schedule::kInPlace;
  std::vector<std::optional<GeoPoint>> next(in_place ? 0 : n);
  std::vector<WeightedPoint> located;
  for (std::size_t iter = 1; iter <= opts.max_iters; ++iter) {
    // In-place sweeps read and write the same state.
    const auto& source = current;
    auto& target = in_place ? current : next;
    double max_move = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      if (!in_place) target[u] = current[u];
      if (is_seed[u]) continue;
      located.clear();
      for (const auto& nb : graph.neighbors(u)) {
        if (source[nb.node]) located.push_back({*source[nb.node], static_cast<double>(nb.weight)});
      }
      if (located.empty()) continue;
      const GeoPoint updated = coordwise_median(located);
      const double move = target[u] ? haversine_km(*target[u], updated)
                                    : std::numeric_limits<double>::infinity();
      max_move = std::max(max_move, move);
      target[u] = updated;
    }
    if (!in_place) current.swap(next);
    result.iterations = iter;
    result.max_displacement_km.push_back(max_move);
    if (observer) observer(iter, current);
    if (max_move < opts.tol_km) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged && opts.require_convergence) {
    throw PropagationError("label propagation did not converge within " +
                           std::to_string(opts.max_iters) + " iterations");
  }
  result.locations = std::move(current);
  return result;
}

MethodRun run_lr(const Dataset& dataset, const LinearModel& model, const KdTreeGrid& grid,
                 const Vocabulary& vocab, Split target) {
  MethodRun run;
  for (const auto& rec : dataset.records) {
    if (rec.split != target) continue;
    run.predictions.push_back({rec.user_id, predict_location(model, grid, transform(rec.text, vocab))});
  }
  return run;
}

MethodRun run_lp(const MentionGraph& graph, const Dataset& dataset,
                 const PropagationOptions& opts, Split target) {
  const auto seeds = train_seeds(graph, dataset);
  MethodRun run;
  run.propagation = propagate(graph, seeds, {}, opts);
  run.predictions = collect(graph, dataset, target, run.propagation);
  return run;
}

MethodRun run_hybrid(const MentionGraph& graph, const Dataset& dataset, const LinearModel& model,
                     const KdTreeGrid& grid, const Vocabulary& vocab,
                     const PropagationOptions& opts, Split target) {
  const auto seeds = train_seeds(graph, dataset);
  std::vector<NodeLocation> init;
  for (const auto& p : run_lr(dataset, model, grid, vocab, target).predictions) {
    const auto id = graph.find(p.user_id);
    if (!id) throw PropagationError("user '" + p.user_id + "' is missing from the graph");
    init.push_back({*id, *p.location});
  }
  MethodRun run;
  run.propagation = propagate(graph, seeds, init, opts);
  run.predictions = collect(graph, dataset, target, run.propagation);
  return run;
}

}  // namespace geoloc
