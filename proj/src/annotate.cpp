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

#include <algorithm>
#include <numeric>
#include <string>

#include "lwgnn/error.hpp"
#include "lwgnn/executor.hpp"
#include "lwgnn/random.hpp"

namespace lwgnn {

std::string_view to_string(InferMode mode) {
  switch (mode) {
    case InferMode::kFull: return "full";
    case InferMode::kPartial: return "partial";
    case InferMode::kSampling: return "sampling";
  }
  return "?";
}

InferMode parse_infer_mode(std::string_view name) {
  for (const auto mode : {InferMode::kFull, InferMode::kPartial, InferMode::kSampling}) {
    if (to_string(mode) == name) return mode;
  }
  fail(ErrorKind::kConfig, "unknown mode '" + std::string(name) + "' (expected full|partial|sampling)");
}

std::string_view to_string(ExecutorKind kind) {
  return kind == ExecutorKind::kLayerwise ? "layerwise" : "nodewise";
}

ExecutorKind parse_executor_kind(std::string_view name) {
  if (name == "layerwise") return ExecutorKind::kLayerwise;
  if (name == "nodewise") return ExecutorKind::kNodewise;
  fail(ErrorKind::kConfig, "unknown executor '" + std::string(name) + "' (expected layerwise|nodewise)");
}

CscGraph sample_neighbors(const CscGraph& g, std::span<const NodeId> nodes, std::size_t fanout, std::uint64_t seed,
                          int layer) {
  if (fanout == 0) fail(ErrorKind::kConfig, "fanout must be at least 1");
  const std::uint64_t n = g.num_nodes();
  std::vector<std::vector<NodeId>> kept(n);
  std::vector<std::size_t> reservoir;
  const std::uint64_t layer_seed = mix_seed(seed, static_cast<std::uint64_t>(layer));
  for (const NodeId v : nodes) {
    const auto slice = g.in_neighbors(v);
    if (slice.size() <= fanout) {
      kept[v].assign(slice.begin(), slice.end());
      continue;
    }
    Rng rng(mix_seed(layer_seed, v));
    reservoir.resize(fanout);
    std::iota(reservoir.begin(), reservoir.end(), std::size_t{0});
    for (std::size_t i = fanout; i < slice.size(); ++i) {
      const auto j = rng.below(i + 1);
      if (j < fanout) reservoir[j] = i;
    }
    std::sort(reservoir.begin(), reservoir.end());
    kept[v].clear();
    for (const auto pos : reservoir) kept[v].push_back(slice[pos]);
  }
  std::vector<std::uint64_t> indptr{0};
  std::vector<NodeId> indices;
  for (NodeId v = 0; v < n; ++v) {
    indices.insert(indices.end(), kept[v].begin(), kept[v].end());
    indptr.push_back(indices.size());
  }
  return CscGraph(std::move(indptr), std::move(indices));
}

LayerGraphs sample_layers(const CscGraph& g, int depth, std::size_t fanout, std::uint64_t seed) {
  if (depth == 0) return LayerGraphs(std::make_shared<const CscGraph>(g));
  std::vector<NodeId> all(g.num_nodes());
  std::iota(all.begin(), all.end(), NodeId{0});
  std::vector<std::shared_ptr<const CscGraph>> per_layer;
  for (int l = 1; l <= depth; ++l) {
    per_layer.push_back(std::make_shared<const CscGraph>(sample_neighbors(g, all, fanout, seed, l)));
  }
  return LayerGraphs(std::move(per_layer));
}

TargetSets annotate(const LayerGraphs& graphs, std::span<const NodeId> targets, int depth, InferMode mode) {
  const std::uint64_t n = graphs.num_nodes();
  TargetSets ts;
  ts.mode = mode;
  ts.num_nodes = n;
  ts.depth = depth;
  ts.graphs = graphs;
  ts.sets.resize(static_cast<std::size_t>(depth) + 1);
  ts.all.assign(static_cast<std::size_t>(depth) + 1, false);

  for (const NodeId t : targets) {
    if (t >= n) fail(ErrorKind::kConfig, "target " + std::to_string(t) + " out of range for " + std::to_string(n) + " nodes");
  }
  std::vector<NodeId> every(n);
  std::iota(every.begin(), every.end(), NodeId{0});

  if (mode == InferMode::kFull) {
    ts.listed = targets.empty() ? every : std::vector<NodeId>(targets.begin(), targets.end());
    for (int l = 0; l <= depth; ++l) {
      ts.sets[l] = every;
      ts.all[l] = true;
    }
    return ts;
  }

  ts.listed.assign(targets.begin(), targets.end());
  auto& top = ts.sets[depth];
  top = ts.listed;
  std::sort(top.begin(), top.end());
  top.erase(std::unique(top.begin(), top.end()), top.end());
  ts.all[depth] = top.size() == n;

  std::vector<bool> mark(n, false);
  for (int l = depth - 1; l >= 1; --l) {
    const auto& upper = ts.sets[l + 1];
    const CscGraph& g = graphs.at(static_cast<std::size_t>(l + 1));
    const auto lhs = static_cast<unsigned __int128>(upper.size()) * g.num_edges();
    const auto rhs = static_cast<unsigned __int128>(n) * n;
    if (ts.skip_from != 0 || (n > 0 && lhs >= rhs)) {
      if (ts.skip_from == 0) ts.skip_from = l;
      ts.sets[l] = every;
      ts.all[l] = true;
      continue;
    }
    std::fill(mark.begin(), mark.end(), false);
    for (const NodeId v : upper) {
      mark[v] = true;
      for (const NodeId u : g.in_neighbors(v)) mark[u] = true;
    }
    auto& set = ts.sets[l];
    for (NodeId v = 0; v < n; ++v) {
      if (mark[v]) set.push_back(v);
    }
    ts.all[l] = set.size() == n;
  }
  return ts;
}

TargetSets annotate(const CscGraph& g, std::span<const NodeId> targets, int depth, InferMode mode, std::size_t fanout,
                    std::uint64_t seed) {
  if (mode == InferMode::kSampling) return annotate(sample_layers(g, depth, fanout, seed), targets, depth, mode);
  return annotate(LayerGraphs(std::make_shared<const CscGraph>(g)), targets, depth, mode);
}

}  // namespace lwgnn
