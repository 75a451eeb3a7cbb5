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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwgnn/batching.hpp"
#include "lwgnn/device.hpp"
#include "lwgnn/embedding_store.hpp"
#include "lwgnn/graph.hpp"
#include "lwgnn/model.hpp"
#include "lwgnn/reorder.hpp"
#include "lwgnn/splitter.hpp"

namespace lwgnn {

enum class InferMode { kFull, kPartial, kSampling };
enum class ExecutorKind { kLayerwise, kNodewise };

std::string_view to_string(InferMode mode);
InferMode parse_infer_mode(std::string_view name);
std::string_view to_string(ExecutorKind kind);
ExecutorKind parse_executor_kind(std::string_view name);

/// Per-node neighbor sample: each listed node keeps min(fanout, deg) distinct
/// in-edge positions drawn by reservoir sampling from a generator seeded with
/// (seed, layer, node), in stored order. Unlisted nodes get empty slices.
CscGraph sample_neighbors(const CscGraph& g, std::span<const NodeId> nodes, std::size_t fanout, std::uint64_t seed,
                          int layer);

/// One sampled graph per layer 1..depth, every node sampled.
LayerGraphs sample_layers(const CscGraph& g, int depth, std::size_t fanout, std::uint64_t seed);

/// Nodes whose embeddings each layer must produce.
struct TargetSets {
  InferMode mode = InferMode::kFull;
  std::uint64_t num_nodes = 0;
  int depth = 0;
  /// sets[l] (sorted, distinct) for l = 1..depth; sets[depth] is the target
  /// set. sets[0] is used only by models without Convs.
  std::vector<std::vector<NodeId>> sets;
  /// all[l]: V[l] covers every node (full mode or the skip rule).
  std::vector<bool> all;
  /// Highest layer assigned all nodes by the skip rule; 0 when it never fired.
  int skip_from = 0;
  /// Output rows in requested order; may repeat ids.
  std::vector<NodeId> listed;
  LayerGraphs graphs;

  const std::vector<NodeId>& at(int l) const { return sets[static_cast<std::size_t>(l)]; }
};

/// Marks V[depth] = targets and expands downwards: V[l] is V[l+1] plus the
/// in-neighbors (under graphs.at(l+1)) of its nodes. When
/// |V[l+1]| * num_edges >= n * n (|V[l+1]| times average degree reaches n)
/// the expansion is skipped and V[l] and every lower layer cover all nodes.
/// Full mode assigns all nodes everywhere; `targets` then only fixes the
/// output row order (empty means 0..n-1).
TargetSets annotate(const LayerGraphs& graphs, std::span<const NodeId> targets, int depth, InferMode mode);

/// Convenience overload that draws the sampled graphs first in sampling mode.
TargetSets annotate(const CscGraph& g, std::span<const NodeId> targets, int depth, InferMode mode,
                    std::size_t fanout = 10, std::uint64_t seed = 0);

struct BlockStats {
  int block = 0;
  int layer = 0;
  std::size_t targets = 0;
  std::size_t batches = 0;
  std::uint64_t transfer_bytes = 0;
  std::uint64_t aggregations = 0;
  std::uint64_t max_footprint = 0;
};

struct RunStats {
  ExecutorKind executor = ExecutorKind::kLayerwise;
  InferMode mode = InferMode::kFull;
  OrderKind order = OrderKind::kNone;
  std::vector<BlockStats> blocks;  // layer-wise only
  /// Conv target-node evaluations per layer counter.
  std::map<int, std::uint64_t> aggregations_by_layer;
  std::uint64_t aggregations = 0;
  std::uint64_t transfer_bytes = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t max_footprint = 0;
  std::size_t batches = 0;
  std::size_t oom_retries = 0;
  Thresholds initial_thresholds;
  Thresholds final_thresholds;
  std::vector<BatchRecord> batch_log;
  std::vector<std::size_t> target_set_sizes;  // |V[l]| for l = 1..depth
  int skip_from = 0;
  double wall_seconds = 0.0;
};

struct LayerwiseOptions {
  bool adaptive = true;
  /// Intermediate stores go to files under this directory when set.
  std::optional<std::filesystem::path> scratch_dir;
};

struct Inference {
  DenseMat output;  // rows aligned with TargetSets::listed
  RunStats stats;
};

/// Executes the schedule block by block over the annotated target sets.
/// `thresholds` carries the controller state across blocks and is updated.
Inference infer_layerwise(const ModelGraph& m, const BlockSchedule& schedule, const TargetSets& sets,
                          const EmbeddingStore& x, const DeviceBudget& budget, Thresholds& thresholds,
                          const LayerwiseOptions& options = {});

/// Reference executor over the unsplit model: each batch of `batch_size`
/// targets (ascending ids) expands its own per-operator node sets and
/// evaluates the whole DAG over them. Throws Error(kOom) when a batch does
/// not fit; there is no retry.
Inference infer_nodewise(const ModelGraph& m, const LayerGraphs& graphs, const EmbeddingStore& x,
                         std::span<const NodeId> listed, std::size_t batch_size, const DeviceBudget& budget);

struct InferenceOptions {
  InferMode mode = InferMode::kFull;
  /// Original node ids. Required in partial mode; all nodes when absent in
  /// sampling mode; ignored in full mode.
  std::optional<std::vector<NodeId>> targets;
  std::size_t fanout = 10;
  std::uint64_t seed = 0;
  OrderKind order = OrderKind::kNone;
  ExecutorKind executor = ExecutorKind::kLayerwise;
  std::uint64_t device_capacity = std::uint64_t{1} << 30;
  Thresholds thresholds;
  bool adaptive = true;
  std::size_t batch_size = 1024;  // node-wise
  std::optional<std::filesystem::path> scratch_dir;
};

/// Reorders, samples, annotates, executes and maps results back to original
/// ids: full mode yields one row per node in id order, the other modes one
/// row per listed target in listed order.
Inference run_inference(const ModelGraph& m, const CscGraph& g, const EmbeddingStore& x, const InferenceOptions& options);

/// Machine-readable stats document. Wall time is included only on request so
/// that repeated runs produce identical bytes.
std::string stats_json(const RunStats& stats, bool include_timing = false);

}  // namespace lwgnn
