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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lwgnn/device.hpp"
#include "lwgnn/graph.hpp"

namespace lwgnn {

/// Per-batch limits on target count (n_t) and total target in-degree (n_i).
struct Thresholds {
  std::uint64_t max_nodes = 1024;
  std::uint64_t max_edges = 32768;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Half-open range of positions in a cursor's target list.
struct BatchRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const BatchRange&, const BatchRange&) = default;
};

/// Ordered targets with their degree prefix sums and a read position.
class BatchCursor {
 public:
  BatchCursor(std::vector<NodeId> targets, DegreePrefix prefix);
  BatchCursor(const CscGraph& g, std::vector<NodeId> targets);

  std::span<const NodeId> targets() const { return targets_; }
  const DegreePrefix& prefix() const { return prefix_; }
  std::size_t position() const { return position_; }
  bool exhausted() const { return position_ == targets_.size(); }
  void advance_to(std::size_t end);

 private:
  std::vector<NodeId> targets_;
  DegreePrefix prefix_;
  std::size_t position_ = 0;
};

/// Largest range starting at the cursor with at most max_nodes targets and at
/// most max_edges total in-degree (binary search on the prefix sums). A first
/// node that alone breaks max_edges still forms a singleton batch. Returns
/// nullopt when the cursor is exhausted.
std::optional<BatchRange> next_batch(const BatchCursor& cursor, const Thresholds& t);

/// Multiplies both thresholds by r = setpoint / peak, clamped to [0.5, 4].
Thresholds adapt(const Thresholds& t, std::uint64_t setpoint, std::uint64_t peak);

/// Halves both thresholds, keeping at least one node.
Thresholds on_oom(const Thresholds& t);

struct BatchRecord {
  int block = 0;
  BatchRange range;
  Thresholds thresholds;  // limits the executed batch was formed under
  BatchFootprint footprint;
  std::size_t oom_retries = 0;
  bool last_in_block = false;  // ended at the end of the target list
};

using MeasureBatch = std::function<BatchFootprint(BatchRange)>;
using ExecuteBatch = std::function<void(BatchRange, const BatchFootprint&)>;

/// Drives one block over all cursor targets. Each candidate batch is measured
/// and admitted against the budget; on OOM the thresholds are halved and the
/// batch is re-formed from the same position. Executed batches partition the
/// target list. With `adaptive`, thresholds follow each executed batch's peak.
/// Throws Error(kOom) when a single node does not fit.
std::vector<BatchRecord> run_layer_batched(BatchCursor& cursor, Thresholds& thresholds, const DeviceBudget& budget,
                                           const MeasureBatch& measure, const ExecuteBatch& execute, bool adaptive = true,
                                           int block = 0);

}  // namespace lwgnn
