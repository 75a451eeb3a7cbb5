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

#include "lwgnn/dense.hpp"
#include "lwgnn/embedding_store.hpp"
#include "lwgnn/graph.hpp"
#include "lwgnn/kernels.hpp"

namespace lwgnn {

enum class OpKind {
  kInput,
  kConvMean,
  kConvAttn,
  kLinear,
  kReLU,
  kLeakyReLU,
  kAdd,
  kConcat,
  kNorm,
  kDropoutIdentity,
  kOutput,
};

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view name);

/// Convs are the only operators that read other nodes' rows.
constexpr bool is_conv(OpKind kind) { return kind == OpKind::kConvMean || kind == OpKind::kConvAttn; }

struct ParamTensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> values;

  std::size_t rank() const { return shape.size(); }
  /// View of a rank-2 tensor, or of slice `index` of a rank-3 tensor.
  MatView matrix(std::size_t index = 0) const;

  friend bool operator==(const ParamTensor&, const ParamTensor&) = default;
};

using ParamSet = std::map<std::string, ParamTensor, std::less<>>;

std::vector<std::uint8_t> encode_params(const ParamSet& params);
ParamSet decode_params(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");
ParamSet load_params(const std::filesystem::path& path);
void write_params(const ParamSet& params, const std::filesystem::path& path);

struct Operator {
  std::string id;
  OpKind kind = OpKind::kInput;
  std::vector<std::string> inputs;
  /// Parameter role ("weight", "bias", "attn") -> tensor name in the ParamSet.
  std::map<std::string, std::string> params;
};

/// Layer counter per Conv: 1 when no Conv precedes it, else one plus the
/// maximum counter over its Conv ancestors. Computed in a single pass over
/// `topo_order` (indices into ops), which must be a topological order.
std::map<std::string, int> assign_layers(std::span<const Operator> ops, std::span<const std::size_t> topo_order);
/// As above with a topological order computed internally; throws on cycles.
std::map<std::string, int> assign_layers(std::span<const Operator> ops);

/// Deterministic topological order (Kahn, smallest index first). Throws
/// Error(kFormat) naming a cycle when the operators are not a DAG.
std::vector<std::size_t> topological_order(std::span<const Operator> ops);

/// A validated operator DAG with parameters, output dims and layer counters.
/// Operators are addressed by their position in `operators()`.
class ModelGraph {
 public:
  /// Validates structure, parameters and dimensions; throws Error(kFormat)
  /// or Error(kShape).
  static ModelGraph build(std::size_t input_dim, std::vector<Operator> ops, ParamSet params, std::string output);

  std::size_t size() const { return ops_.size(); }
  const std::vector<Operator>& operators() const { return ops_; }
  const Operator& op(std::size_t i) const { return ops_[i]; }
  std::size_t index_of(std::string_view id) const;

  const std::vector<std::size_t>& producers(std::size_t i) const { return producers_[i]; }
  const std::vector<std::size_t>& consumers(std::size_t i) const { return consumers_[i]; }
  const std::vector<std::size_t>& topo_order() const { return topo_; }

  std::size_t out_dim(std::size_t i) const { return out_dims_[i]; }
  /// Layer counter of a Conv; 0 for every other operator.
  int layer_of(std::size_t i) const { return layers_[i]; }
  /// Maximum layer counter (0 for a model without Convs).
  int depth() const { return depth_; }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t input_index() const { return input_; }
  /// The Output operator whose value is the model result.
  std::size_t output_index() const { return output_; }
  const std::string& output_id() const { return ops_[output_].id; }

  const ParamSet& params() const { return params_; }
  /// Tensor bound to `role` on operator i, or nullptr when not bound.
  const ParamTensor* param(std::size_t i, std::string_view role) const;

 private:
  std::size_t input_dim_ = 0;
  std::vector<Operator> ops_;
  ParamSet params_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::size_t>> producers_;
  std::vector<std::vector<std::size_t>> consumers_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> out_dims_;
  std::vector<int> layers_;
  int depth_ = 0;
  std::size_t input_ = 0;
  std::size_t output_ = 0;
};

/// Model document (JSON text) plus parameter file.
ModelGraph parse_model(const std::filesystem::path& model_path, const std::filesystem::path& params_path);
ModelGraph parse_model_document(std::string_view document, ParamSet params, const std::string& source = "<memory>");
std::string serialize_model(const ModelGraph& m);

/// Evaluates a non-Conv operator on row-aligned operands.
DenseMat eval_normal(const ModelGraph& m, std::size_t op, std::span<const DenseMat* const> inputs);
/// Evaluates a Conv: `h_in` is indexed by the batch's input positions, the
/// result by its targets.
DenseMat eval_conv(const ModelGraph& m, std::size_t op, const BatchCsc& bc, const DenseMat& h_in);

/// Whole-graph single-pass evaluation: every operator over every node, no
/// batching. Conv layer l aggregates over graphs.at(l).
EmbeddingStore eval_reference(const ModelGraph& m, const LayerGraphs& graphs, const EmbeddingStore& x);
EmbeddingStore eval_reference(const ModelGraph& m, const CscGraph& g, const EmbeddingStore& x);

}  // namespace lwgnn
