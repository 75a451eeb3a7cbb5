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

#include "lwgnn/graph.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"
#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {

constexpr char kGraphMagic[] = "DGIG";
constexpr std::uint32_t kGraphVersion = 1;

// Byte offsets of the arrays inside a graph file, used in error messages.
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8;

}  // namespace

CscGraph::CscGraph() : indptr_{0} {}

CscGraph::CscGraph(std::vector<std::uint64_t> indptr, std::vector<NodeId> indices)
    : indptr_(std::move(indptr)), indices_(std::move(indices)) {
  if (indptr_.empty()) fail(ErrorKind::kFormat, "indptr must have num_nodes+1 entries, got 0");
  if (indptr_[0] != 0) fail(ErrorKind::kFormat, "indptr[0] = " + std::to_string(indptr_[0]) + ", expected 0");
  for (std::size_t i = 1; i < indptr_.size(); ++i) {
    if (indptr_[i] < indptr_[i - 1]) {
      fail(ErrorKind::kFormat, "indptr not monotone at entry " + std::to_string(i));
    }
  }
  if (indptr_.back() != indices_.size()) {
    fail(ErrorKind::kFormat, "indptr[num_nodes] = " + std::to_string(indptr_.back()) + " but num_edges = " +
                                 std::to_string(indices_.size()));
  }
  const std::uint64_t n = num_nodes();
  for (std::size_t e = 0; e < indices_.size(); ++e) {
    if (indices_[e] >= n) {
      fail(ErrorKind::kFormat, "indices[" + std::to_string(e) + "] = " + std::to_string(indices_[e]) +
                                   " out of range for " + std::to_string(n) + " nodes");
    }
  }
}

std::span<const NodeId> CscGraph::in_neighbors(NodeId v) const {
  if (v >= num_nodes()) {
    fail(ErrorKind::kBounds, "node " + std::to_string(v) + " out of range for " + std::to_string(num_nodes()) + " nodes");
  }
  return std::span<const NodeId>(indices_).subspan(indptr_[v], indptr_[v + 1] - indptr_[v]);
}

std::uint64_t CscGraph::in_degree(NodeId v) const { return in_neighbors(v).size(); }

CscGraph graph_from_edges(std::uint64_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::uint64_t> indptr(num_nodes + 1, 0);
  for (const auto& [src, dst] : edges) {
    if (src >= num_nodes || dst >= num_nodes) {
      fail(ErrorKind::kBounds, "edge (" + std::to_string(src) + "," + std::to_string(dst) + ") out of range");
    }
    ++indptr[dst + 1];
  }
  for (std::uint64_t v = 0; v < num_nodes; ++v) indptr[v + 1] += indptr[v];
  std::vector<std::uint64_t> cursor(indptr.begin(), indptr.end() - 1);
  std::vector<NodeId> indices(edges.size());
  for (const auto& [src, dst] : edges) indices[cursor[dst]++] = src;
  return CscGraph(std::move(indptr), std::move(indices));
}

std::vector<std::uint8_t> encode_graph(const CscGraph& g) {
  io::ByteWriter w;
  w.magic(kGraphMagic);
  w.u32(kGraphVersion);
  w.u64(g.num_nodes());
  w.u64(g.num_edges());
  w.array(g.indptr());
  w.array(g.indices());
  return w.bytes();
}

CscGraph decode_graph(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic(kGraphMagic);
  const std::size_t version_at = r.offset();
  if (const auto version = r.u32("version"); version != kGraphVersion) {
    r.fail_at(version_at, "unsupported version " + std::to_string(version));
  }
  const std::uint64_t n = r.u64("num_nodes");
  const std::uint64_t m = r.u64("num_edges");
  if (n == UINT64_MAX) r.fail_at(8, "num_nodes overflows");
  auto indptr = r.array<std::uint64_t>(n + 1, "indptr");
  const std::size_t indices_at = r.offset();
  auto indices = r.array<NodeId>(m, "indices");
  r.expect_end();

  // Re-check the invariants here so errors carry file offsets.
  if (indptr[0] != 0) r.fail_at(kHeaderBytes, "indptr[0] = " + std::to_string(indptr[0]) + ", expected 0");
  for (std::size_t i = 1; i <= n; ++i) {
    if (indptr[i] < indptr[i - 1]) r.fail_at(kHeaderBytes + 8 * i, "indptr not monotone at entry " + std::to_string(i));
  }
  if (indptr[n] != m) {
    r.fail_at(kHeaderBytes + 8 * n, "indptr[num_nodes] = " + std::to_string(indptr[n]) + " but num_edges = " + std::to_string(m));
  }
  for (std::size_t e = 0; e < m; ++e) {
    if (indices[e] >= n) {
      r.fail_at(indices_at + 8 * e, "index " + std::to_string(indices[e]) + " out of range for " + std::to_string(n) + " nodes");
    }
  }
  return CscGraph(std::move(indptr), std::move(indices));
}

CscGraph load_graph(const std::filesystem::path& path) { return decode_graph(io::read_file(path), path.string()); }

void write_graph(const CscGraph& g, const std::filesystem::path& path) { io::write_file(path, encode_graph(g)); }

DegreePrefix degree_prefix(const CscGraph& g, std::span<const NodeId> order) {
  const std::uint64_t n = g.num_nodes();
  std::vector<bool> seen(n, false);
  DegreePrefix out;
  out.prefix.reserve(order.size() + 1);
  out.prefix.push_back(0);
  for (std::size_t j = 0; j < order.size(); ++j) {
    const NodeId v = order[j];
    if (v >= n) fail(ErrorKind::kConfig, "order[" + std::to_string(j) + "] = " + std::to_string(v) + " is not a node");
    if (seen[v]) fail(ErrorKind::kConfig, "order is not a permutation: node " + std::to_string(v) + " repeats at " + std::to_string(j));
    seen[v] = true;
    out.prefix.push_back(out.prefix.back() + g.in_degree(v));
  }
  return out;
}

LayerGraphs::LayerGraphs(std::shared_ptr<const CscGraph> shared) : shared_(std::move(shared)) {}

LayerGraphs::LayerGraphs(std::vector<std::shared_ptr<const CscGraph>> per_layer) : graphs_(std::move(per_layer)) {}

const CscGraph& LayerGraphs::at(std::size_t layer) const {
  if (shared_) return *shared_;
  if (layer == 0 || layer > graphs_.size()) {
    fail(ErrorKind::kInvariant, "no graph for layer " + std::to_string(layer));
  }
  return *graphs_[layer - 1];
}

std::uint64_t LayerGraphs::num_nodes() const {
  if (shared_) return shared_->num_nodes();
  return graphs_.empty() ? 0 : graphs_.front()->num_nodes();
}

}  // namespace lwgnn
