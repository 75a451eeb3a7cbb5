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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwgnn/model.hpp"

namespace lwgnn {

/// Which node rows an operator inside a ConvBlock is evaluated over.
enum class Domain {
  kInputNodes,   // targets and their in-neighbors; feeds a Conv of the block
  kTargetNodes,  // the batch targets only
};

/// A tensor stored between blocks: the producing operator's output.
struct TensorRef {
  std::string tensor;  // producing operator id
  int block = 0;       // producing block id; 0 for the model input

  friend bool operator==(const TensorRef&, const TensorRef&) = default;
};

struct ConvBlock {
  int id = 0;     // 1-based position in the schedule
  int layer = 0;  // shared layer counter of the block's Convs; 0 only for a Conv-free model
  std::vector<std::size_t> members;  // operator indices in topological order
  std::vector<Domain> domains;       // aligned with members
  std::vector<TensorRef> inputs;
  std::vector<TensorRef> outputs;
};

struct BlockSchedule {
  std::vector<ConvBlock> blocks;
  /// Upstream tensors each block reads, keyed by block id.
  std::map<int, std::vector<TensorRef>> schema;
  /// Tensor id -> block after whose completion its store is released. The
  /// model input and the final result are never released.
  std::map<std::string, int> drop_after;
  /// Entry l-1: distinct tensors produced at or before block l that are read
  /// after it.
  std::vector<std::size_t> boundary_crossings;
  /// Block id of every operator (0 for the Input operator).
  std::vector<int> block_of;
  std::vector<std::string> warnings;
};

/// Partitions the model into ConvBlocks: Convs grouped by layer counter; at
/// each boundary the normal operators that can be computed in the upstream
/// block are split so the number of tensors crossing the boundary is minimal,
/// ties broken towards more upstream operators, then towards the
/// lexicographically smallest downstream id set. An operator may move
/// upstream only if each of its operands is produced inside the upstream
/// block or is already one of that block's inputs.
BlockSchedule split(const ModelGraph& m);

struct Cut {
  std::vector<std::string> upstream;    // candidate operators placed in block l
  std::vector<std::string> downstream;  // candidates left to later blocks
  std::size_t crossing = 0;
  std::size_t upstream_ops = 0;
};

/// Brute-force list of every valid cut at the boundary after block l
/// (1 <= l < depth), given split's placement of all earlier boundaries.
std::vector<Cut> enumerate_cuts(const ModelGraph& m, int l);

struct Lifetimes {
  std::map<std::string, int> drop_after;
  std::vector<std::string> warnings;
};

/// Maps each block output to the last block reading it. Outputs nobody reads
/// (other than `result`) are released right after their producing block, with
/// a warning.
Lifetimes plan_lifetimes(std::span<const ConvBlock> blocks, std::string_view result);

/// Stable one-line-per-block rendering used by the `split` subcommand.
std::string format_schedule(const ModelGraph& m, const BlockSchedule& s);

}  // namespace lwgnn
