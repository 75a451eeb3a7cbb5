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

#include "lwgnn/reorder.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/random.hpp"

namespace lwgnn {

namespace {

constexpr char kPermMagic[] = "DGIP";

// Deduplicated undirected neighbor lists without self loops.
std::vector<std::vector<NodeId>> symmetrize(const CscGraph& g) {
  const std::uint64_t n = g.num_nodes();
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId v = 0; v < n; ++v) {
    for (const NodeId u : g.in_neighbors(v)) {
      if (u == v) continue;
      adj[v].push_back(u);
      adj[u].push_back(v);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

NodeOrder::NodeOrder(std::vector<NodeId> perm) : perm_(std::move(perm)), inv_(perm_.size(), 0) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t p = 0; p < perm_.size(); ++p) {
    const NodeId old = perm_[p];
    if (old >= perm_.size() || seen[old]) {
      fail(ErrorKind::kConfig, "not a permutation: entry " + std::to_string(p) + " = " + std::to_string(old));
    }
    seen[old] = true;
    inv_[old] = p;
  }
}

NodeOrder NodeOrder::identity(std::uint64_t n) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  return NodeOrder(std::move(perm));
}

bool NodeOrder::is_identity() const {
  for (std::size_t p = 0; p < perm_.size(); ++p) {
    if (perm_[p] != p) return false;
  }
  return true;
}

std::string_view to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::kNone: return "none";
    case OrderKind::kRcmk: return "rcmk";
    case OrderKind::kDegree: return "degree";
    case OrderKind::kRandom: return "random";
  }
  return "?";
}

OrderKind parse_order_kind(std::string_view name) {
  for (const auto kind : {OrderKind::kNone, OrderKind::kRcmk, OrderKind::kDegree, OrderKind::kRandom}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorKind::kConfig, "unknown order '" + std::string(name) + "' (expected rcmk|degree|random|none)");
}

NodeOrder rcmk(const CscGraph& g) {
  const std::uint64_t n = g.num_nodes();
  const auto adj = symmetrize(g);
  const auto less = [&](NodeId a, NodeId b) {
    return adj[a].size() != adj[b].size() ? adj[a].size() < adj[b].size() : a < b;
  };

  // Component labels and each component's start node.
  std::vector<std::int64_t> component(n, -1);
  std::vector<NodeId> starts;
  for (NodeId s = 0; s < n; ++s) {
    if (component[s] != -1) continue;
    const auto label = static_cast<std::int64_t>(starts.size());
    NodeId best = s;
    std::vector<NodeId> stack{s};
    component[s] = label;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      if (less(v, best)) best = v;
      for (const NodeId u : adj[v]) {
        if (component[u] == -1) {
          component[u] = label;
          stack.push_back(u);
        }
      }
    }
    starts.push_back(best);
  }
  std::sort(starts.begin(), starts.end());

  std::vector<NodeId> sequence;
  sequence.reserve(n);
  std::vector<bool> visited(n, false);
  std::vector<NodeId> frontier;
  for (const NodeId start : starts) {
    std::size_t head = sequence.size();
    sequence.push_back(start);
    visited[start] = true;
    while (head < sequence.size()) {
      const NodeId v = sequence[head++];
      frontier.clear();
      for (const NodeId u : adj[v]) {
        if (!visited[u]) frontier.push_back(u);
      }
      std::sort(frontier.begin(), frontier.end(), less);
      for (const NodeId u : frontier) {
        visited[u] = true;
        sequence.push_back(u);
      }
    }
  }
  std::reverse(sequence.begin(), sequence.end());
  return NodeOrder(std::move(sequence));
}

NodeOrder degree_sort(const CscGraph& g) {
  std::vector<NodeId> perm(g.num_nodes());
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::stable_sort(perm.begin(), perm.end(), [&](NodeId a, NodeId b) { return g.in_degree(a) < g.in_degree(b); });
  return NodeOrder(std::move(perm));
}

NodeOrder random_order(const CscGraph& g, std::uint64_t seed) {
  std::vector<NodeId> perm(g.num_nodes());
  std::iota(perm.begin(), perm.end(), NodeId{0});
  Rng rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  return NodeOrder(std::move(perm));
}

NodeOrder make_order(const CscGraph& g, OrderKind kind, std::uint64_t seed) {
  switch (kind) {
    case OrderKind::kRcmk: return rcmk(g);
    case OrderKind::kDegree: return degree_sort(g);
    case OrderKind::kRandom: return random_order(g, seed);
    case OrderKind::kNone: break;
  }
  return NodeOrder::identity(g.num_nodes());
}

CscGraph relabel(const CscGraph& g, const NodeOrder& o) {
  if (o.size() != g.num_nodes()) {
    fail(ErrorKind::kShape, "order over " + std::to_string(o.size()) + " nodes applied to a graph of " +
                                std::to_string(g.num_nodes()));
  }
  std::vector<std::uint64_t> indptr{0};
  indptr.reserve(g.num_nodes() + 1);
  std::vector<NodeId> indices;
  indices.reserve(g.num_edges());
  for (NodeId p = 0; p < g.num_nodes(); ++p) {
    for (const NodeId u : g.in_neighbors(o.old_id(p))) indices.push_back(o.new_id(u));
    indptr.push_back(indices.size());
  }
  return CscGraph(std::move(indptr), std::move(indices));
}

std::pair<CscGraph, EmbeddingStore> apply_order(const CscGraph& g, const EmbeddingStore& x, const NodeOrder& o) {
  if (x.rows() != g.num_nodes()) {
    fail(ErrorKind::kShape, "features have " + std::to_string(x.rows()) + " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  CscGraph relabeled = relabel(g, o);
  return {std::move(relabeled), EmbeddingStore::from_matrix(x.gather_rows(o.perm()))};
}

std::uint64_t bandwidth(const CscGraph& g) {
  std::uint64_t bw = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (const NodeId u : g.in_neighbors(v)) bw = std::max(bw, u > v ? u - v : v - u);
  }
  return bw;
}

void write_permutation(const NodeOrder& o, const std::filesystem::path& path) {
  io::ByteWriter w;
  w.magic(kPermMagic);
  w.u64(o.size());
  w.array<NodeId>(o.perm());
  io::write_file(path, w.bytes());
}

NodeOrder load_permutation(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes, path.string());
  r.expect_magic(kPermMagic);
  const std::uint64_t n = r.u64("n");
  auto perm = r.array<NodeId>(n, "perm");
  r.expect_end();
  return NodeOrder(std::move(perm));
}

}  // namespace lwgnn
