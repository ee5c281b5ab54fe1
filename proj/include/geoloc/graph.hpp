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
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoloc/corpus.hpp"

namespace geoloc {

enum class NodeRole : std::uint8_t { kTrain, kDev, kTest, kExternal };

std::string_view to_string(NodeRole role);
std::optional<NodeRole> parse_role(std::string_view name);
NodeRole role_of(Split split);

using NodeId = std::uint32_t;

struct GraphNode {
  std::string handle;  // lowercased
  NodeRole role = NodeRole::kExternal;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  std::uint64_t weight = 0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  std::uint64_t weight = 0;
};

struct GraphStats {
  std::size_t train_nodes = 0;
  std::size_t dev_nodes = 0;
  std::size_t test_nodes = 0;
  std::size_t external_nodes = 0;
  std::size_t edges = 0;
  std::uint64_t total_mentions = 0;

  std::size_t nodes() const { return train_nodes + dev_nodes + test_nodes + external_nodes; }
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected @-mention graph. Nodes are every dataset user plus every
// mentioned handle outside the dataset; an edge's weight counts the
// mentions either endpoint made of the other.
class MentionGraph {
 public:
  static MentionGraph build(const Dataset& dataset);

  // Assembles a graph from explicit parts. Parallel edges are merged by
  // summing weights; self-loops, zero weights and dangling endpoints are
  // rejected.
  static MentionGraph from_parts(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::span<const GraphNode> nodes() const noexcept { return nodes_; }
  std::span<const GraphEdge> edges() const noexcept { return edges_; }
  const GraphNode& node(NodeId id) const { return nodes_.at(id); }
  std::optional<NodeId> find(std::string_view handle) const;

  std::span<const Neighbor> neighbors(NodeId id) const;
  std::uint64_t weight_between(NodeId a, NodeId b) const;

  GraphStats stats() const;

  // Nodes with a path to at least one train node (train nodes included).
  std::vector<bool> connected_to_train() const;

  const std::string& source_hash() const noexcept { return source_hash_; }
  void set_source_hash(std::string hash) { source_hash_ = std::move(hash); }

  // Edge list `u \t v \t weight` (handles) plus a `handle \t role`
  // sidecar, each with a '#' header line.
  void write(std::ostream& edges_out, std::ostream& nodes_out) const;
  static MentionGraph read(std::istream& edges_in, std::istream& nodes_in);
  void save(const std::filesystem::path& edges_path, const std::filesystem::path& nodes_path) const;
  static MentionGraph load(const std::filesystem::path& edges_path,
                           const std::filesystem::path& nodes_path);

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::string source_hash_;
};

// Fraction of test nodes with no path to any train node; 0 when there are
// no test nodes.
double disconnected_test_fraction(const MentionGraph& graph);

std::string to_lower_ascii(std::string_view s);

}  // namespace geoloc
