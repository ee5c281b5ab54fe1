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

#include "geoloc/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "geoloc/features.hpp"
#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

constexpr std::string_view kEdgesHeader = "# geoloc-graph-edges v1";
constexpr std::string_view kNodesHeader = "# geoloc-graph-nodes v1";

std::string header_source(const std::string& line, std::string_view header) {
  if (!line.starts_with(header)) return {};
  const auto pos = line.find("source=");
  if (pos == std::string::npos) return {};
  std::string value = line.substr(pos + 7);
  return value == "-" ? std::string{} : value;
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kTrain: return "train";
    case NodeRole::kDev: return "dev";
    case NodeRole::kTest: return "test";
    case NodeRole::kExternal: return "external";
  }
  return "unknown";
}

std::optional<NodeRole> parse_role(std::string_view name) {
  if (name == "external") return NodeRole::kExternal;
  if (auto split = parse_split(name)) return role_of(*split);
  return std::nullopt;
}

NodeRole role_of(Split split) {
  switch (split) {
    case Split::kTrain: return NodeRole::kTrain;
    case Split::kDev: return NodeRole::kDev;
    case Split::kTest: return NodeRole::kTest;
  }
  return NodeRole::kExternal;
}

MentionGraph MentionGraph::build(const Dataset& dataset) {
  // Dataset users first in handle order, then externals in handle order,
  // so node ids do not depend on record order.
  std::map<std::string, NodeRole> users;
  for (const auto& rec : dataset.records) {
    auto [it, inserted] = users.emplace(to_lower_ascii(rec.user_id), role_of(rec.split));
    if (!inserted) {
      throw GraphError("user ids collide case-insensitively: '" + rec.user_id + "'");
    }
  }

  std::map<std::pair<std::string, std::string>, std::uint64_t> pair_counts;
  std::map<std::string, NodeRole> externals;
  for (const auto& rec : dataset.records) {
    const std::string self = to_lower_ascii(rec.user_id);
    for (const auto& token : tokenize(rec.text)) {
      if (!is_mention(token)) continue;
      std::string handle = token.substr(1);
      if (handle == self) continue;
      if (!users.contains(handle)) externals.emplace(handle, NodeRole::kExternal);
      auto key = self < handle ? std::make_pair(self, handle) : std::make_pair(handle, self);
      ++pair_counts[key];
    }
  }

  std::vector<GraphNode> nodes;
  nodes.reserve(users.size() + externals.size());
  for (const auto& [handle, role] : users) nodes.push_back({handle, role});
  for (const auto& [handle, role] : externals) nodes.push_back({handle, role});
  std::unordered_map<std::string, NodeId> ids;
  for (NodeId i = 0; i < nodes.size(); ++i) ids.emplace(nodes[i].handle, i);

  std::vector<GraphEdge> edges;
  edges.reserve(pair_counts.size());
  for (const auto& [key, count] : pair_counts) {
    edges.push_back({ids.at(key.first), ids.at(key.second), count});
  }
  MentionGraph graph = from_parts(std::move(nodes), std::move(edges));
  graph.source_hash_ = dataset_hash(dataset);
  return graph;
}

MentionGraph MentionGraph::from_parts(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges) {
  MentionGraph graph;
  graph.nodes_ = std::move(nodes);
  for (NodeId i = 0; i < graph.nodes_.size(); ++i) {
    if (graph.nodes_[i].handle.empty()) throw GraphError("node " + std::to_string(i) + " has no handle");
    if (!graph.index_.emplace(graph.nodes_[i].handle, i).second) {
      throw GraphError("duplicate node handle '" + graph.nodes_[i].handle + "'");
    }
  }

  std::map<std::pair<NodeId, NodeId>, std::uint64_t> merged;
  for (const auto& e : edges) {
    if (e.u >= graph.nodes_.size() || e.v >= graph.nodes_.size()) {
      throw GraphError("edge endpoint out of range");
    }
    if (e.u == e.v) throw GraphError("self-loop on '" + graph.nodes_[e.u].handle + "'");
    if (e.weight == 0) throw GraphError("zero-weight edge");
    merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
  }
  graph.edges_.reserve(merged.size());
  for (const auto& [key, weight] : merged) graph.edges_.push_back({key.first, key.second, weight});

  std::vector<std::size_t> degree(graph.nodes_.size(), 0);
  for (const auto& e : graph.edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  graph.offsets_.assign(graph.nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < degree.size(); ++i) graph.offsets_[i + 1] = graph.offsets_[i] + degree[i];
  graph.adjacency_.resize(graph.offsets_.back());
  std::vector<std::size_t> cursor(graph.offsets_.begin(), graph.offsets_.end() - 1);
  for (const auto& e : graph.edges_) {
    graph.adjacency_[cursor[e.u]++] = {e.v, e.weight};
    graph.adjacency_[cursor[e.v]++] = {e.u, e.weight};
  }
  return graph;
}

std::optional<NodeId> MentionGraph::find(std::string_view handle) const {
  auto it = index_.find(to_lower_ascii(handle));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Neighbor> MentionGraph::neighbors(NodeId id) const {
  if (id >= nodes_.size()) throw GraphError("node id out of range");
  return std::span<const Neighbor>(adjacency_).subspan(offsets_[id], offsets_[id + 1] - offsets_[id]);
}

std::uint64_t MentionGraph::weight_between(NodeId a, NodeId b) const {
  for (const auto& n : neighbors(a)) {
    if (n.node == b) return n.weight;
  }
  return 0;
}

GraphStats MentionGraph::stats() const {
  GraphStats s;
  for (const auto& n : nodes_) {
    switch (n.role) {
      case NodeRole::kTrain: ++s.train_nodes; break;
      case NodeRole::kDev: ++s.dev_nodes; break;
      case NodeRole::kTest: ++s.test_nodes; break;
      case NodeRole::kExternal: ++s.external_nodes; break;
    }
  }
  s.edges = edges_.size();
  for (const auto& e : edges_) s.total_mentions += e.weight;
  return s;
}

std::vector<bool> MentionGraph::connected_to_train() const {
  std::vector<bool> reached(nodes_.size(), false);
  std::deque<NodeId> frontier;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].role == NodeRole::kTrain) {
      reached[i] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (const auto& n : neighbors(u)) {
      if (!reached[n.node]) {
        reached[n.node] = true;
        frontier.push_back(n.node);
      }
    }
  }
  return reached;
}

double disconnected_test_fraction(const MentionGraph& graph) {
  const auto reached = graph.connected_to_train();
  std::size_t tests = 0;
  std::size_t disconnected = 0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    if (graph.node(i).role != NodeRole::kTest) continue;
    ++tests;
    if (!reached[i]) ++disconnected;
  }
  return tests == 0 ? 0.0 : static_cast<double>(disconnected) / static_cast<double>(tests);
}

void MentionGraph::write(std::ostream& edges_out, std::ostream& nodes_out) const {
  const std::string source = source_hash_.empty() ? "-" : source_hash_;
  edges_out << kEdgesHeader << " source=" << source << '\n';
  for (const auto& e : edges_) {
    edges_out << nodes_[e.u].handle << '\t' << nodes_[e.v].handle << '\t' << e.weight << '\n';
  }
  nodes_out << kNodesHeader << " source=" << source << '\n';
  for (const auto& n : nodes_) nodes_out << n.handle << '\t' << to_string(n.role) << '\n';
}

MentionGraph MentionGraph::read(std::istream& edges_in, std::istream& nodes_in) {
  std::string line;
  if (!std::getline(nodes_in, line) || !line.starts_with(kNodesHeader)) {
    throw GraphError("node file lacks the geoloc header");
  }
  const std::string source = header_source(line, kNodesHeader);
  std::vector<GraphNode> nodes;
  std::unordered_map<std::string, NodeId> ids;
  std::size_t lineno = 1;
  while (std::getline(nodes_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto role = fields.size() == 2 ? parse_role(fields[1]) : std::nullopt;
    if (!role) throw GraphError("node file line " + std::to_string(lineno) + " is malformed");
    ids.emplace(std::string(fields[0]), static_cast<NodeId>(nodes.size()));
    nodes.push_back({std::string(fields[0]), *role});
  }

  if (!std::getline(edges_in, line) || !line.starts_with(kEdgesHeader)) {
    throw GraphError("edge file lacks the geoloc header");
  }
  if (header_source(line, kEdgesHeader) != source) {
    throw GraphError("edge and node files come from different datasets");
  }
  std::vector<GraphEdge> edges;
  lineno = 1;
  while (std::getline(edges_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto weight = fields.size() == 3 ? parse_int(fields[2]) : std::nullopt;
    if (!weight || *weight <= 0) {
      throw GraphError("edge file line " + std::to_string(lineno) + " is malformed");
    }
    auto u = ids.find(std::string(fields[0]));
    auto v = ids.find(std::string(fields[1]));
    if (u == ids.end() || v == ids.end()) {
      throw GraphError("edge file line " + std::to_string(lineno) + " names an unknown node");
    }
    edges.push_back({u->second, v->second, static_cast<std::uint64_t>(*weight)});
  }
  MentionGraph graph = from_parts(std::move(nodes), std::move(edges));
  graph.source_hash_ = source;
  return graph;
}

void MentionGraph::save(const std::filesystem::path& edges_path,
                        const std::filesystem::path& nodes_path) const {
  std::ofstream edges_out(edges_path, std::ios::binary);
  std::ofstream nodes_out(nodes_path, std::ios::binary);
  if (!edges_out || !nodes_out) throw GraphError("cannot write graph files");
  write(edges_out, nodes_out);
}

MentionGraph MentionGraph::load(const std::filesystem::path& edges_path,
                                const std::filesystem::path& nodes_path) {
  std::ifstream edges_in(edges_path, std::ios::binary);
  std::ifstream nodes_in(nodes_path, std::ios::binary);
  if (!edges_in || !nodes_in) {
    throw GraphError("cannot open graph files '" + edges_path.string() + "', '" +
                     nodes_path.string() + "'");
  }
  return read(edges_in, nodes_in);
}

}  // namespace geoloc
