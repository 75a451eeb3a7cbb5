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

#include "lwgnn/device.hpp"

#include <string>

#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {
constexpr std::uint64_t kIdBytes = 8;
constexpr std::uint64_t kValueBytes = 4;
}  // namespace

DeviceBudget DeviceBudget::with_capacity(std::uint64_t capacity) {
  DeviceBudget b;
  b.capacity = capacity;
  b.target = static_cast<std::uint64_t>(static_cast<unsigned __int128>(capacity) * 9 / 10);
  if (b.target == 0) fail(ErrorKind::kConfig, "device capacity " + std::to_string(capacity) + " bytes is too small");
  return b;
}

BlockShape block_shape(const ModelGraph& m, const ConvBlock& block) {
  BlockShape shape;
  for (const auto& ref : block.inputs) shape.input_dims.push_back(m.out_dim(m.index_of(ref.tensor)));
  for (std::size_t k = 0; k < block.members.size(); ++k) {
    const auto i = block.members[k];
    if (m.op(i).kind == OpKind::kOutput) continue;
    shape.ops.push_back({m.out_dim(i), block.domains[k]});
  }
  for (const auto& ref : block.outputs) shape.output_dims.push_back(m.out_dim(m.index_of(ref.tensor)));
  return shape;
}

std::uint64_t graph_slice_bytes(std::size_t targets, std::size_t edges) {
  return targets == 0 ? 0 : (targets + 1 + edges) * kIdBytes;
}

BatchFootprint footprint(const BlockShape& shape, std::size_t targets, std::size_t inputs, std::size_t edges) {
  BatchFootprint fp;
  if (targets == 0) return fp;
  fp.graph_slice_bytes = graph_slice_bytes(targets, edges);
  for (const auto d : shape.input_dims) fp.input_bytes += inputs * d * kValueBytes;
  for (const auto& op : shape.ops) {
    const std::size_t rows = op.domain == Domain::kInputNodes ? inputs : targets;
    fp.intermediate_bytes += rows * op.dim * kValueBytes;
  }
  for (const auto d : shape.output_dims) fp.output_bytes += targets * d * kValueBytes;
  return fp;
}

BatchFootprint footprint(const BlockShape& shape, const BatchCsc& bc) {
  return footprint(shape, bc.targets.size(), bc.inputs.size(), bc.num_edges());
}

Admission admit(const BatchFootprint& fp, const DeviceBudget& budget) {
  return fp.peak() > budget.capacity ? Admission::kOom : Admission::kOk;
}

std::uint64_t transfer_bytes(const BatchFootprint& fp) { return fp.graph_slice_bytes + fp.input_bytes + fp.output_bytes; }

std::uint64_t meter_transfer(const BlockShape& shape, const BatchCsc& bc) { return transfer_bytes(footprint(shape, bc)); }

}  // namespace lwgnn
