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

#include <chrono>
#include <numeric>
#include <string>

#include "json.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/executor.hpp"

namespace lwgnn {

Inference run_inference(const ModelGraph& m, const CscGraph& g, const EmbeddingStore& x, const InferenceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = g.num_nodes();
  if (x.rows() != n || x.dim() != m.input_dim()) {
    fail(ErrorKind::kShape, "features are " + std::to_string(x.rows()) + "x" + std::to_string(x.dim()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(m.input_dim()));
  }
  if (options.mode == InferMode::kPartial && !options.targets) {
    fail(ErrorKind::kConfig, "partial inference needs a target list");
  }
  if (options.mode == InferMode::kSampling && options.fanout == 0) fail(ErrorKind::kConfig, "fanout must be at least 1");

  const NodeOrder order = make_order(g, options.order, options.seed);
  const bool identity = order.is_identity();

  // Sampling draws on original ids so every ordering sees the same samples.
  LayerGraphs graphs;
  if (options.mode == InferMode::kSampling) {
    const LayerGraphs drawn = sample_layers(g, m.depth(), options.fanout, options.seed);
    std::vector<std::shared_ptr<const CscGraph>> per_layer;
    for (int l = 1; l <= m.depth(); ++l) {
      per_layer.push_back(std::make_shared<const CscGraph>(relabel(drawn.at(static_cast<std::size_t>(l)), order)));
    }
    graphs = m.depth() == 0 ? LayerGraphs(std::make_shared<const CscGraph>(relabel(g, order))) : LayerGraphs(std::move(per_layer));
  } else {
    graphs = LayerGraphs(std::make_shared<const CscGraph>(identity ? g : relabel(g, order)));
  }

  std::optional<EmbeddingStore> permuted;
  if (!identity) permuted = EmbeddingStore::from_matrix(x.gather_rows(order.perm()));
  const EmbeddingStore& xs = permuted ? *permuted : x;

  std::vector<NodeId> listed;
  if (options.mode == InferMode::kFull || !options.targets) {
    listed.resize(n);
    std::iota(listed.begin(), listed.end(), NodeId{0});
  } else {
    listed = *options.targets;
  }
  for (auto& t : listed) {
    if (t >= n) fail(ErrorKind::kConfig, "target " + std::to_string(t) + " out of range for " + std::to_string(n) + " nodes");
    t = order.new_id(t);
  }

  const TargetSets sets = annotate(graphs, listed, m.depth(), options.mode);
  const DeviceBudget budget = DeviceBudget::with_capacity(options.device_capacity);

  Inference result;
  if (options.executor == ExecutorKind::kLayerwise) {
    Thresholds thresholds = options.thresholds;
    result = infer_layerwise(m, split(m), sets, xs, budget, thresholds, {options.adaptive, options.scratch_dir});
  } else {
    result = infer_nodewise(m, graphs, xs, sets.listed, options.batch_size, budget);
    for (int l = 1; l <= sets.depth; ++l) result.stats.target_set_sizes.push_back(sets.at(l).size());
    result.stats.skip_from = sets.skip_from;
  }
  result.stats.mode = options.mode;
  result.stats.order = options.order;
  result.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string stats_json(const RunStats& s, bool include_timing) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["executor"] = std::string(to_string(s.executor));
  doc["mode"] = std::string(to_string(s.mode));
  doc["order"] = std::string(to_string(s.order));
  doc["features_permuted"] = s.order != OrderKind::kNone;
  doc["batches"] = s.batches;
  doc["oom_retries"] = s.oom_retries;
  doc["transfer_bytes"] = s.transfer_bytes;
  doc["input_bytes"] = s.input_bytes;
  doc["max_footprint"] = s.max_footprint;
  doc["aggregations"] = s.aggregations;
  ordered_json by_layer = ordered_json::object();
  for (const auto& [layer, count] : s.aggregations_by_layer) by_layer[std::to_string(layer)] = count;
  doc["aggregations_by_layer"] = by_layer;
  doc["target_set_sizes"] = s.target_set_sizes;
  doc["skip_from_layer"] = s.skip_from;
  doc["thresholds_carried_across_layers"] = true;
  doc["initial_thresholds"] = {{"n_t", s.initial_thresholds.max_nodes}, {"n_i", s.initial_thresholds.max_edges}};
  doc["final_thresholds"] = {{"n_t", s.final_thresholds.max_nodes}, {"n_i", s.final_thresholds.max_edges}};
  ordered_json blocks = ordered_json::array();
  for (const auto& b : s.blocks) {
    blocks.push_back({{"block", b.block},
                      {"layer", b.layer},
                      {"targets", b.targets},
                      {"batches", b.batches},
                      {"transfer_bytes", b.transfer_bytes},
                      {"aggregations", b.aggregations},
                      {"max_footprint", b.max_footprint}});
  }
  doc["blocks"] = blocks;
  ordered_json log = ordered_json::array();
  for (const auto& r : s.batch_log) {
    log.push_back({{"block", r.block},
                   {"begin", r.range.begin},
                   {"end", r.range.end},
                   {"n_t", r.thresholds.max_nodes},
                   {"n_i", r.thresholds.max_edges},
                   {"peak", r.footprint.peak()},
                   {"transfer", transfer_bytes(r.footprint)},
                   {"oom_retries", r.oom_retries}});
  }
  doc["batch_log"] = log;
  if (include_timing) doc["wall_seconds"] = s.wall_seconds;
  return doc.dump(2) + "\n";
}

}  // namespace lwgnn
