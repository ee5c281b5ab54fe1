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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "geoloc/corpus.hpp"
#include "geoloc/features.hpp"
#include "geoloc/geo.hpp"
#include "geoloc/graph.hpp"
#include "geoloc/grid.hpp"
#include "geoloc/prediction.hpp"
#include "geoloc/textmodel.hpp"

namespace geoloc {

class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeLocation {
  NodeId node = 0;
  GeoPoint location;
};

// kInPlace sweeps nodes in id order and reads values already updated in
// the same sweep. kSynchronous computes every update from the previous
// iteration's state; it is order-free but can fall into period-2 cycles
// between adjacent non-seed nodes.
enum class Schedule { kInPlace, kSynchronous };

std::string_view to_string(Schedule schedule);
std::optional<Schedule> parse_schedule(std::string_view name);

struct PropagationOptions {
  Schedule schedule = Schedule::kInPlace;
  std::size_t max_iters = 10;
  double tol_km = 0.1;
  // Throw instead of returning a truncated run when max_iters is hit.
  bool require_convergence = true;
};

struct PropagationResult {
  std::vector<std::optional<GeoPoint>> locations;  // indexed by NodeId
  std::size_t iterations = 0;
  bool converged = false;
  // Largest per-node move in each iteration; a node gaining its first
  // location counts as an infinite move.
  std::vector<double> max_displacement_km;
};

// Called after every iteration with the iteration number (1-based) and the
// full node state.
using IterationObserver =
    std::function<void(std::size_t, std::span<const std::optional<GeoPoint>>)>;

// Label propagation. Each iteration replaces every non-seed node that has
// a located neighbour by the edge-weighted coordinate-wise median of those
// neighbours' locations. Seeds never move; nodes without located
// neighbours keep their state (an init estimate or nothing). Stops once
// the largest move in an iteration is below tol_km.
PropagationResult propagate(const MentionGraph& graph, std::span<const NodeLocation> seeds,
                            std::span<const NodeLocation> init,
                            const PropagationOptions& opts = {},
                            const IterationObserver& observer = {});

struct MethodRun {
  std::vector<Prediction> predictions;  // target users in dataset order
  PropagationResult propagation;        // empty for text-only runs
};

// Text-only: decode(predict_region(tfidf(text))) for every target user.
MethodRun run_lr(const Dataset& dataset, const LinearModel& model, const KdTreeGrid& grid,
                 const Vocabulary& vocab, Split target = Split::kTest);

// Network-only: train users seed the propagation; target users the graph
// cannot reach come back unlocated.
MethodRun run_lp(const MentionGraph& graph, const Dataset& dataset,
                 const PropagationOptions& opts = {}, Split target = Split::kTest);

// Text estimates initialise every target node before propagation, so
// users cut off from the seeds keep their text-based location.
MethodRun run_hybrid(const MentionGraph& graph, const Dataset& dataset, const LinearModel& model,
                     const KdTreeGrid& grid, const Vocabulary& vocab,
                     const PropagationOptions& opts = {}, Split target = Split::kTest);

}  // namespace geoloc
