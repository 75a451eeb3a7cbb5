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
#include <span>
#include <vector>

#include "lwgnn/kernels.hpp"
#include "lwgnn/splitter.hpp"

namespace lwgnn {

/// Device memory limit and the controller's setpoint (90% of capacity).
struct DeviceBudget {
  std::uint64_t capacity = 0;
  std::uint64_t target = 0;

  /// Throws Error(kConfig) when the setpoint would be zero.
  static DeviceBudget with_capacity(std::uint64_t capacity);
};

/// Modelled device memory of one batch. All components are derived from the
/// batch plan; nothing is measured.
struct BatchFootprint {
  std::uint64_t graph_slice_bytes = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t intermediate_bytes = 0;
  std::uint64_t output_bytes = 0;

  std::uint64_t peak() const { return graph_slice_bytes + input_bytes + intermediate_bytes + output_bytes; }
};

/// Row widths a block moves and materializes, independent of the batch.
struct BlockShape {
  std::vector<std::size_t> input_dims;  // one per upstream tensor
  struct Materialized {
    std::size_t dim;
    Domain domain;
  };
  std::vector<Materialized> ops;  // every member except Output pass-throughs
  std::vector<std::size_t> output_dims;
};

BlockShape block_shape(const ModelGraph& m, const ConvBlock& block);

BatchFootprint footprint(const BlockShape& shape, std::size_t targets, std::size_t inputs, std::size_t edges);
BatchFootprint footprint(const BlockShape& shape, const BatchCsc& bc);

enum class Admission { kOk, kOom };

/// OOM iff peak exceeds capacity; peak == capacity is admitted.
Admission admit(const BatchFootprint& fp, const DeviceBudget& budget);

/// Host <-> device bytes for a batch: graph slice, each distinct input row of
/// every upstream tensor once, and the dumped target rows.
std::uint64_t meter_transfer(const BlockShape& shape, const BatchCsc& bc);
std::uint64_t transfer_bytes(const BatchFootprint& fp);

std::uint64_t graph_slice_bytes(std::size_t targets, std::size_t edges);

}  // namespace lwgnn
