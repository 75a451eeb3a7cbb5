/*
 * Copyright (c) 2026, The lwgnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace lwgnn {

using NodeId = std::uint64_t;

/// Immutable in-neighbor adjacency in compressed sparse column form:
/// the in-neighbors of v are indices[indptr[v] .. indptr[v+1]) in stored order.
class CscGraph {
 public:
  /// The empty graph (0 nodes).
  CscGraph();

  /// Validates every invariant; throws Error(kFormat) naming the offending
  /// position on failure.
  CscGraph(std::vector<std::uint64_t> indptr, std::vector<NodeId> indices);

  std::uint64_t num_nodes() const { return indptr_.size() - 1; }
  std::uint64_t num_edges() const { return indices_.size(); }

  /// Throws Error(kBounds) when v is out of range.
  std::span<const NodeId> in_neighbors(NodeId v) const;
  std::uint64_t in_degree(NodeId v) const;

  std::span<const std::uint64_t> indptr() const { return indptr_; }
  std::span<const NodeId> indices() const { return indices_; }

  friend bool operator==(const CscGraph&, const CscGraph&) = default;

 private:
  std::vector<std::uint64_t> indptr_;
  std::vector<NodeId> indices_;
};

/// Builds a CSC graph from (src, dst) edges. Each destination's slice keeps the
/// relative order in which its edges appear in `edges`.
CscGraph graph_from_edges(std::uint64_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges);

CscGraph load_graph(const std::filesystem::path& path);
void write_graph(const CscGraph& g, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_graph(const CscGraph& g);
CscGraph decode_graph(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

/// Cumulative in-degrees under a node ordering:
/// prefix[j+1] = prefix[j] + in_degree(order[j]).
struct DegreePrefix {
  std::vector<std::uint64_t> prefix;

  /// Total in-degree of the nodes at ordered positions [begin, end).
  std::uint64_t range_sum(std::size_t begin, std::size_t end) const { return prefix[end] - prefix[begin]; }
};

/// `order` must list distinct node ids; it may be a subset of the nodes (a
/// target list). Throws Error(kConfig) on duplicates or out-of-range ids.
DegreePrefix degree_prefix(const CscGraph& g, std::span<const NodeId> order);

/// The neighbor structure each Conv layer aggregates over: one graph shared by
/// every layer, or one (sampled) graph per layer.
class LayerGraphs {
 public:
  LayerGraphs() = default;
  explicit LayerGraphs(std::shared_ptr<const CscGraph> shared);
  explicit LayerGraphs(std::vector<std::shared_ptr<const CscGraph>> per_layer);

  /// Graph used by Convs with layer counter `layer` (1-based).
  const CscGraph& at(std::size_t layer) const;
  std::uint64_t num_nodes() const;
  bool sampled() const { return !shared_; }

 private:
  std::shared_ptr<const CscGraph> shared_;
  std::vector<std::shared_ptr<const CscGraph>> graphs_;
};

}  // namespace lwgnn
