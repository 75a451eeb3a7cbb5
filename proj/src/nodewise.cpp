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
#include <string>

#include "lwgnn/error.hpp"
#include "lwgnn/executor.hpp"

namespace lwgnn {

namespace {

constexpr std::uint64_t kValueBytes = 4;

std::size_t position_in(const std::vector<NodeId>& sorted, NodeId v) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) fail(ErrorKind::kInvariant, "node " + std::to_string(v) + " missing from its flow set");
  return static_cast<std::size_t>(it - sorted.begin());
}

std::vector<NodeId> merge_sets(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::vector<NodeId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Targets plus their in-neighbors, sorted and distinct.
std::vector<NodeId> expand(const CscGraph& g, const std::vector<NodeId>& nodes) {
  std::vector<NodeId> out(nodes);
  for (const NodeId v : nodes) {
    const auto nb = g.in_neighbors(v);
    out.insert(out.end(), nb.begin(), nb.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Local CSC from `targets` onto positions in the sorted `inputs` list.
BatchCsc flow_batch(const CscGraph& g, const std::vector<NodeId>& targets, const std::vector<NodeId>& inputs) {
  BatchCsc bc;
  bc.targets = targets;
  bc.inputs = inputs;
  bc.indptr.push_back(0);
  for (const NodeId v : targets) {
    for (const NodeId u : g.in_neighbors(v)) bc.indices.push_back(position_in(inputs, u));
    bc.indptr.push_back(bc.indices.size());
    bc.self_pos.push_back(position_in(inputs, v));
  }
  return bc;
}

}  // namespace

Inference infer_nodewise(const ModelGraph& m, const LayerGraphs& graphs, const EmbeddingStore& x,
                         std::span<const NodeId> listed, std::size_t batch_size, const DeviceBudget& budget) {
  if (batch_size == 0) fail(ErrorKind::kConfig, "batch size must be at least 1");
  const std::uint64_t n = graphs.num_nodes();
  if (x.rows() != n || x.dim() != m.input_dim()) {
    fail(ErrorKind::kShape, "features are " + std::to_string(x.rows()) + "x" + std::to_string(x.dim()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(m.input_dim()));
  }
  for (const NodeId t : listed) {
    if (t >= n) fail(ErrorKind::kConfig, "target " + std::to_string(t) + " out of range for " + std::to_string(n) + " nodes");
  }

  std::vector<NodeId> targets(listed.begin(), listed.end());
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Inference result;
  RunStats& stats = result.stats;
  stats.executor = ExecutorKind::kNodewise;

  const std::size_t out_dim = m.out_dim(m.output_index());
  DenseMat computed(targets.size(), out_dim);
  const auto& topo = m.topo_order();

  for (std::size_t begin = 0; begin < targets.size(); begin += batch_size) {
    const std::size_t end = std::min(targets.size(), begin + batch_size);
    std::vector<std::vector<NodeId>> need(m.size());
    need[m.output_index()].assign(targets.begin() + static_cast<std::ptrdiff_t>(begin),
                                  targets.begin() + static_cast<std::ptrdiff_t>(end));

    // Backward: the nodes at which each operator must be evaluated.
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const auto i = *it;
      if (need[i].empty()) continue;
      const Operator& o = m.op(i);
      const std::vector<NodeId> required =
          is_conv(o.kind) ? expand(graphs.at(static_cast<std::size_t>(m.layer_of(i))), need[i]) : need[i];
      for (const auto p : m.producers(i)) need[p] = merge_sets(need[p], required);
    }

    BatchFootprint fp;
    std::map<int, std::uint64_t> aggregations;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (need[i].empty()) continue;
      const Operator& o = m.op(i);
      if (o.kind == OpKind::kInput) {
        fp.input_bytes += need[i].size() * m.input_dim() * kValueBytes;
        continue;
      }
      if (o.kind == OpKind::kOutput) continue;
      fp.intermediate_bytes += need[i].size() * m.out_dim(i) * kValueBytes;
      if (is_conv(o.kind)) {
        const CscGraph& g = graphs.at(static_cast<std::size_t>(m.layer_of(i)));
        std::uint64_t edges = 0;
        for (const NodeId v : need[i]) edges += g.in_degree(v);
        fp.graph_slice_bytes += graph_slice_bytes(need[i].size(), edges);
        aggregations[m.layer_of(i)] += need[i].size();
      }
    }
    fp.output_bytes = (end - begin) * out_dim * kValueBytes;
    if (admit(fp, budget) == Admission::kOom) {
      fail(ErrorKind::kOom, "node-wise batch starting at node " + std::to_string(targets[begin]) + " needs " +
                                std::to_string(fp.peak()) + " bytes > capacity " + std::to_string(budget.capacity));
    }

    // Forward over the flow sets.
    std::vector<DenseMat> values(m.size());
    for (const auto i : topo) {
      if (need[i].empty()) continue;
      const Operator& o = m.op(i);
      if (o.kind == OpKind::kInput) {
        values[i] = x.gather_rows(need[i]);
      } else if (is_conv(o.kind)) {
        const auto p = m.producers(i).front();
        const BatchCsc bc = flow_batch(graphs.at(static_cast<std::size_t>(m.layer_of(i))), need[i], need[p]);
        values[i] = eval_conv(m, i, bc, values[p]);
      } else {
        std::vector<DenseMat> narrowed;
        narrowed.reserve(m.producers(i).size());
        std::vector<const DenseMat*> operands;
        for (const auto p : m.producers(i)) {
          if (need[p].size() == need[i].size()) {
            operands.push_back(&values[p]);
            continue;
          }
          std::vector<std::size_t> rows(need[i].size());
          for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = position_in(need[p], need[i][k]);
          narrowed.push_back(kernels::take_rows(values[p], rows));
          operands.push_back(&narrowed.back());
        }
        values[i] = eval_normal(m, i, operands);
      }
    }
    const DenseMat& out = values[m.output_index()];
    for (std::size_t k = 0; k < out.rows(); ++k) {
      std::copy(out.row(k).begin(), out.row(k).end(), computed.row(begin + k).begin());
    }

    BatchRecord rec;
    rec.range = {begin, end};
    rec.thresholds = {batch_size, 0};
    rec.footprint = fp;
    rec.last_in_block = end == targets.size();
    stats.batch_log.push_back(rec);
    ++stats.batches;
    stats.transfer_bytes += transfer_bytes(fp);
    stats.input_bytes += fp.input_bytes;
    stats.max_footprint = std::max(stats.max_footprint, fp.peak());
    for (const auto& [layer, count] : aggregations) {
      stats.aggregations_by_layer[layer] += count;
      stats.aggregations += count;
    }
  }

  result.output = DenseMat(listed.size(), out_dim);
  for (std::size_t k = 0; k < listed.size(); ++k) {
    const auto src = computed.row(position_in(targets, listed[k]));
    std::copy(src.begin(), src.end(), result.output.row(k).begin());
  }
  return result;
}

}  // namespace lwgnn
