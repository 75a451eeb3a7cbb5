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

#include <cstddef>
#include <span>
#include <vector>

#include "lwgnn/dense.hpp"
#include "lwgnn/graph.hpp"

namespace lwgnn {

/// One batch's slice of the graph: targets, the deduplicated input set, and a
/// local CSC mapping every target onto positions in `inputs`.
struct BatchCsc {
  std::vector<NodeId> targets;
  std::vector<NodeId> inputs;
  std::vector<std::size_t> indptr;    // targets.size() + 1
  std::vector<std::size_t> indices;   // positions into inputs, stored neighbor order
  std::vector<std::size_t> self_pos;  // position of targets[i] in inputs

  std::size_t num_edges() const { return indices.size(); }
};

/// Builds the batch for `targets` (distinct ids) over g. Inputs list the
/// targets first, in order, followed by every other in-neighbor in order of
/// first appearance, so self_pos[i] == i.
BatchCsc build_batch(const CscGraph& g, std::span<const NodeId> targets);

/// Batch whose targets and inputs are all nodes of g in id order; local
/// positions equal node ids.
BatchCsc whole_graph_batch(const CscGraph& g);

/// Throws Error(kInvariant) when local indices or self positions are invalid.
void validate_batch(const BatchCsc& bc);

namespace kernels {

inline constexpr float kLeakySlope = 0.2f;
inline constexpr float kNormEps = 1e-12f;

/// out[i] = W x[i] + b. Every output element is a sequential float32 dot
/// product in index order, so row i depends on x[i] only. `bias` may be empty.
DenseMat linear(const DenseMat& x, const MatView& weight, std::span<const float> bias);

/// Mean over {in-neighbors} U {self}: neighbors summed in stored order, self
/// last, divided by deg+1. `h_in` is indexed by input position.
DenseMat agg_mean(const BatchCsc& bc, const DenseMat& h_in);

/// Parameters of one attention head.
struct AttnHead {
  MatView weight;               // out x in
  std::span<const float> attn;  // 2 * out: [source half | target half]
};

/// Additive attention per head, softmax over {in-neighbors} U {self}, heads
/// concatenated in order.
DenseMat agg_attn(const BatchCsc& bc, const DenseMat& h_in, std::span<const AttnHead> heads);

DenseMat relu(const DenseMat& x);
DenseMat leaky_relu(const DenseMat& x, float slope = kLeakySlope);
/// Elementwise sum, accumulated in operand order.
DenseMat add(std::span<const DenseMat* const> parts);
/// Row-wise x / max(||x||_2, eps).
DenseMat l2_normalize(const DenseMat& x, float eps = kNormEps);
/// Column-wise concatenation in list order.
DenseMat concat(std::span<const DenseMat* const> parts);
/// Row k of the result is row rows[k] of x.
DenseMat take_rows(const DenseMat& x, std::span<const std::size_t> rows);

}  // namespace kernels
}  // namespace lwgnn
