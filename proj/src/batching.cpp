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

#include "lwgnn/batching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {

constexpr double kMinRatio = 0.5;
constexpr double kMaxRatio = 4.0;
constexpr std::uint64_t kLimitCeiling = std::uint64_t{1} << 62;

std::uint64_t scale(std::uint64_t value, double r) {
  const double scaled = std::round(r * static_cast<double>(value));
  return scaled >= static_cast<double>(kLimitCeiling) ? kLimitCeiling : static_cast<std::uint64_t>(scaled);
}

}  // namespace

BatchCursor::BatchCursor(std::vector<NodeId> targets, DegreePrefix prefix)
    : targets_(std::move(targets)), prefix_(std::move(prefix)) {
  if (prefix_.prefix.size() != targets_.size() + 1) {
    fail(ErrorKind::kInvariant, "degree prefix has " + std::to_string(prefix_.prefix.size()) + " entries for " +
                                    std::to_string(targets_.size()) + " targets");
  }
}

BatchCursor::BatchCursor(const CscGraph& g, std::vector<NodeId> targets)
    : BatchCursor(targets, degree_prefix(g, targets)) {}

void BatchCursor::advance_to(std::size_t end) {
  if (end < position_ || end > targets_.size()) fail(ErrorKind::kInvariant, "cursor advanced out of order");
  position_ = end;
}

std::optional<BatchRange> next_batch(const BatchCursor& cursor, const Thresholds& t) {
  if (cursor.exhausted()) return std::nullopt;
  const std::size_t pos = cursor.position();
  const std::size_t len = cursor.targets().size();
  const auto& prefix = cursor.prefix().prefix;
  const std::size_t hi = pos + static_cast<std::size_t>(std::min<std::uint64_t>(t.max_nodes, len - pos));
  const std::uint64_t limit =
      prefix[pos] > UINT64_MAX - t.max_edges ? UINT64_MAX : prefix[pos] + t.max_edges;
  // Last j in [pos, hi] with prefix[j] <= limit; prefix is non-decreasing.
  const auto first = prefix.begin() + static_cast<std::ptrdiff_t>(pos);
  const auto last = prefix.begin() + static_cast<std::ptrdiff_t>(hi) + 1;
  std::size_t j = static_cast<std::size_t>(std::upper_bound(first, last, limit) - prefix.begin()) - 1;
  if (j == pos) j = pos + 1;
  return BatchRange{pos, j};
}

Thresholds adapt(const Thresholds& t, std::uint64_t setpoint, std::uint64_t peak) {
  if (peak == 0) fail(ErrorKind::kInvariant, "adapt called with a zero-byte batch");
  const double r = std::clamp(static_cast<double>(setpoint) / static_cast<double>(peak), kMinRatio, kMaxRatio);
  return {std::max<std::uint64_t>(1, scale(t.max_nodes, r)), scale(t.max_edges, r)};
}

Thresholds on_oom(const Thresholds& t) { return {std::max<std::uint64_t>(1, t.max_nodes / 2), t.max_edges / 2}; }

std::vector<BatchRecord> run_layer_batched(BatchCursor& cursor, Thresholds& thresholds, const DeviceBudget& budget,
                                           const MeasureBatch& measure, const ExecuteBatch& execute, bool adaptive,
                                           int block) {
  std::vector<BatchRecord> log;
  while (auto range = next_batch(cursor, thresholds)) {
    std::size_t retries = 0;
    BatchFootprint fp = measure(*range);
    while (admit(fp, budget) == Admission::kOom) {
      if (range->size() == 1) {
        fail(ErrorKind::kOom, "node " + std::to_string(cursor.targets()[range->begin]) + " exceeds the device: footprint " +
                                  std::to_string(fp.peak()) + " bytes > capacity " + std::to_string(budget.capacity));
      }
      thresholds = on_oom(thresholds);
      ++retries;
      range = next_batch(cursor, thresholds);
      fp = measure(*range);
    }
    BatchRecord rec;
    rec.block = block;
    rec.range = *range;
    rec.thresholds = thresholds;
    rec.footprint = fp;
    rec.oom_retries = retries;
    rec.last_in_block = range->end == cursor.targets().size();
    execute(*range, fp);
    cursor.advance_to(range->end);
    if (adaptive) thresholds = adapt(thresholds, budget.target, fp.peak());
    log.push_back(rec);
  }
  return log;
}

}  // namespace lwgnn
