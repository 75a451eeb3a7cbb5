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
#include <map>
#include <memory>
#include <string>

#include "lwgnn/error.hpp"
#include "lwgnn/executor.hpp"

namespace lwgnn {

namespace {

// Rows of one stored tensor: every node, or a sorted subset addressed by
// binary search.
class TensorStore {
 public:
  TensorStore(const EmbeddingStore& borrowed, std::uint64_t num_nodes) : view_(&borrowed), num_nodes_(num_nodes) {}

  TensorStore(std::vector<NodeId> rows, std::uint64_t num_nodes, std::size_t dim,
              const std::optional<std::filesystem::path>& file)
      : owned_(std::make_unique<EmbeddingStore>(
            EmbeddingStore::create(rows.size(), dim, file ? Backing::kFile : Backing::kMemory, file))),
        view_(owned_.get()),
        num_nodes_(num_nodes) {
    if (rows.size() != num_nodes) rows_ = std::move(rows);
  }

  DenseMat gather(std::span<const NodeId> ids) const {
    std::vector<NodeId> positions(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) positions[k] = position(ids[k]);
    return view_->gather_rows(positions);
  }

  void write(NodeId v, std::span<const float> values) { owned_->write_row(position(v), values); }

 private:
  NodeId position(NodeId v) const {
    if (rows_.empty()) {
      if (v >= num_nodes_) fail(ErrorKind::kInvariant, "row " + std::to_string(v) + " outside the store");
      return v;
    }
    const auto it = std::lower_bound(rows_.begin(), rows_.end(), v);
    if (it == rows_.end() || *it != v) {
      fail(ErrorKind::kInvariant, "row " + std::to_string(v) + " was never computed for this tensor");
    }
    return static_cast<NodeId>(it - rows_.begin());
  }

  std::unique_ptr<EmbeddingStore> owned_;
  const EmbeddingStore* view_ = nullptr;
  std::uint64_t num_nodes_ = 0;
  std::vector<NodeId> rows_;  // empty: identity over all nodes
};

BatchCsc self_only_batch(std::span<const NodeId> targets) {
  BatchCsc bc;
  bc.targets.assign(targets.begin(), targets.end());
  bc.inputs = bc.targets;
  bc.indptr.assign(targets.size() + 1, 0);
  bc.self_pos.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) bc.self_pos[i] = i;
  return bc;
}

struct Value {
  const DenseMat* mat = nullptr;
  Domain domain = Domain::kTargetNodes;
};

class BlockRunner {
 public:
  BlockRunner(const ModelGraph& m, const ConvBlock& block, std::map<std::size_t, TensorStore>& stores)
      : m_(m), block_(block), stores_(stores) {}

  // Runs one batch; returns the Conv target evaluations performed.
  std::uint64_t run(const BatchCsc& bc) {
    std::map<std::size_t, DenseMat> loaded;
    for (const auto& ref : block_.inputs) {
      const auto idx = m_.index_of(ref.tensor);
      loaded.emplace(idx, stores_.at(idx).gather(bc.inputs));
    }
    std::map<std::size_t, DenseMat> local;
    std::map<std::size_t, Domain> domain_of;
    std::map<std::size_t, DenseMat> restricted;

    const auto value = [&](std::size_t p) -> Value {
      if (auto it = local.find(p); it != local.end()) return {&it->second, domain_of.at(p)};
      return {&loaded.at(p), Domain::kInputNodes};
    };
    const auto at_targets = [&](std::size_t p) -> const DenseMat& {
      const Value v = value(p);
      if (v.domain == Domain::kTargetNodes) return *v.mat;
      auto it = restricted.find(p);
      if (it == restricted.end()) it = restricted.emplace(p, kernels::take_rows(*v.mat, bc.self_pos)).first;
      return it->second;
    };

    std::uint64_t aggregations = 0;
    for (std::size_t k = 0; k < block_.members.size(); ++k) {
      const auto i = block_.members[k];
      const Domain domain = block_.domains[k];
      const Operator& o = m_.op(i);
      if (is_conv(o.kind)) {
        const Value in = value(m_.producers(i).front());
        if (in.domain != Domain::kInputNodes) {
          fail(ErrorKind::kInvariant, "Conv '" + o.id + "' reads a tensor that only covers batch targets");
        }
        local.emplace(i, eval_conv(m_, i, bc, *in.mat));
        aggregations += bc.targets.size();
      } else {
        std::vector<const DenseMat*> operands;
        for (const auto p : m_.producers(i)) {
          if (domain == Domain::kTargetNodes) {
            operands.push_back(&at_targets(p));
          } else {
            const Value v = value(p);
            if (v.domain != Domain::kInputNodes) {
              fail(ErrorKind::kInvariant, "input-domain operator '" + o.id + "' reads a target-only tensor");
            }
            operands.push_back(v.mat);
          }
        }
        local.emplace(i, eval_normal(m_, i, operands));
      }
      domain_of[i] = is_conv(o.kind) ? Domain::kTargetNodes : domain;
    }

    for (const auto& ref : block_.outputs) {
      const auto idx = m_.index_of(ref.tensor);
      const DenseMat& rows = at_targets(idx);
      auto& store = stores_.at(idx);
      for (std::size_t t = 0; t < bc.targets.size(); ++t) store.write(bc.targets[t], rows.row(t));
    }
    return aggregations;
  }

 private:
  const ModelGraph& m_;
  const ConvBlock& block_;
  std::map<std::size_t, TensorStore>& stores_;
};

}  // namespace

Inference infer_layerwise(const ModelGraph& m, const BlockSchedule& schedule, const TargetSets& sets,
                          const EmbeddingStore& x, const DeviceBudget& budget, Thresholds& thresholds,
                          const LayerwiseOptions& options) {
  const std::uint64_t n = sets.num_nodes;
  if (x.rows() != n || x.dim() != m.input_dim()) {
    fail(ErrorKind::kShape, "features are " + std::to_string(x.rows()) + "x" + std::to_string(x.dim()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(m.input_dim()));
  }
  Inference result;
  RunStats& stats = result.stats;
  stats.executor = ExecutorKind::kLayerwise;
  stats.mode = sets.mode;
  stats.initial_thresholds = thresholds;
  stats.skip_from = sets.skip_from;
  for (int l = 1; l <= sets.depth; ++l) stats.target_set_sizes.push_back(sets.at(l).size());

  std::map<std::size_t, TensorStore> stores;
  stores.emplace(m.input_index(), TensorStore(x, n));

  for (const ConvBlock& block : schedule.blocks) {
    const auto& targets = sets.at(block.layer);
    for (const auto& ref : block.outputs) {
      const auto idx = m.index_of(ref.tensor);
      std::optional<std::filesystem::path> file;
      if (options.scratch_dir) file = *options.scratch_dir / ("h" + std::to_string(idx) + ".dgif");
      stores.emplace(idx, TensorStore(targets, n, m.out_dim(idx), file));
    }

    const CscGraph* g = block.layer >= 1 ? &sets.graphs.at(static_cast<std::size_t>(block.layer)) : nullptr;
    BatchCursor cursor = g ? BatchCursor(*g, targets)
                           : BatchCursor(targets, DegreePrefix{std::vector<std::uint64_t>(targets.size() + 1, 0)});
    const BlockShape shape = block_shape(m, block);
    BlockRunner runner(m, block, stores);

    BlockStats bs;
    bs.block = block.id;
    bs.layer = block.layer;
    bs.targets = targets.size();

    BatchRange cached_range;
    BatchCsc cached;
    const auto prepare = [&](BatchRange range) -> const BatchCsc& {
      if (!(range == cached_range) || cached.targets.empty()) {
        const auto span = cursor.targets().subspan(range.begin, range.size());
        cached = g ? build_batch(*g, span) : self_only_batch(span);
        cached_range = range;
      }
      return cached;
    };
    const MeasureBatch measure = [&](BatchRange range) { return footprint(shape, prepare(range)); };
    const ExecuteBatch execute = [&](BatchRange range, const BatchFootprint& fp) {
      const std::uint64_t agg = runner.run(prepare(range));
      bs.aggregations += agg;
      bs.transfer_bytes += transfer_bytes(fp);
      bs.max_footprint = std::max(bs.max_footprint, fp.peak());
      stats.input_bytes += fp.input_bytes;
    };
    auto log = run_layer_batched(cursor, thresholds, budget, measure, execute, options.adaptive, block.id);

    bs.batches = log.size();
    for (const auto& rec : log) stats.oom_retries += rec.oom_retries;
    stats.batch_log.insert(stats.batch_log.end(), log.begin(), log.end());
    stats.batches += bs.batches;
    stats.aggregations += bs.aggregations;
    stats.transfer_bytes += bs.transfer_bytes;
    stats.max_footprint = std::max(stats.max_footprint, bs.max_footprint);
    if (block.layer >= 1) stats.aggregations_by_layer[block.layer] += bs.aggregations;
    stats.blocks.push_back(bs);

    for (const auto& [tensor, last] : schedule.drop_after) {
      if (last == block.id) stores.erase(m.index_of(tensor));
    }
  }

  if (schedule.blocks.empty()) fail(ErrorKind::kInvariant, "empty block schedule");
  result.output = stores.at(m.output_index()).gather(sets.listed);
  stats.final_thresholds = thresholds;
  return result;
}

}  // namespace lwgnn
