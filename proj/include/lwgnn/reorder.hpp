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
#include <string_view>
#include <utility>
#include <vector>

#include "lwgnn/embedding_store.hpp"
#include "lwgnn/graph.hpp"

namespace lwgnn {

/// A node renumbering: perm maps new position -> old id, inv old id -> new position.
class NodeOrder {
 public:
  NodeOrder() = default;
  /// Throws Error(kConfig) unless `perm` is a permutation of 0..n-1.
  explicit NodeOrder(std::vector<NodeId> perm);
  static NodeOrder identity(std::uint64_t n);

  std::uint64_t size() const { return perm_.size(); }
  const std::vector<NodeId>& perm() const { return perm_; }
  const std::vector<NodeId>& inv() const { return inv_; }
  NodeId old_id(NodeId position) const { return perm_[position]; }
  NodeId new_id(NodeId old) const { return inv_[old]; }
  NodeOrder inverse() const { return NodeOrder(inv_); }
  bool is_identity() const;

 private:
  std::vector<NodeId> perm_;
  std::vector<NodeId> inv_;
};

enum class OrderKind { kNone, kRcmk, kDegree, kRandom };

std::string_view to_string(OrderKind kind);
OrderKind parse_order_kind(std::string_view name);

/// Reverse Cuthill-McKee on the symmetrized adjacency (in- plus out-edges).
/// Each component starts at its minimum-degree node (ties: smaller id) and is
/// walked breadth-first, visiting unvisited neighbors by ascending
/// (degree, id); components are concatenated in ascending order of their start
/// node and the whole sequence is reversed.
NodeOrder rcmk(const CscGraph& g);

/// Stable ascending sort by in-degree.
NodeOrder degree_sort(const CscGraph& g);

/// Seeded Fisher-Yates shuffle.
NodeOrder random_order(const CscGraph& g, std::uint64_t seed);

NodeOrder make_order(const CscGraph& g, OrderKind kind, std::uint64_t seed);

/// Relabels the graph: new node p takes old node perm[p]'s in-neighbor slice
/// with every id mapped through inv. Slice order is kept as stored, so
/// per-node summation order does not depend on the numbering.
CscGraph relabel(const CscGraph& g, const NodeOrder& o);

/// Relabels the graph and permutes feature rows (new row p = old row perm[p]).
std::pair<CscGraph, EmbeddingStore> apply_order(const CscGraph& g, const EmbeddingStore& x, const NodeOrder& o);

/// Maximum |new(u) - new(v)| over edges.
std::uint64_t bandwidth(const CscGraph& g);

void write_permutation(const NodeOrder& o, const std::filesystem::path& path);
NodeOrder load_permutation(const std::filesystem::path& path);

}  // namespace lwgnn
