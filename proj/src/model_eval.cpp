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

#include <map>
#include <string>

#include "lwgnn/error.hpp"
#include "lwgnn/kernels.hpp"
#include "lwgnn/model.hpp"

namespace lwgnn {

DenseMat eval_normal(const ModelGraph& m, std::size_t op, std::span<const DenseMat* const> inputs) {
  const Operator& o = m.op(op);
  if (inputs.size() != o.inputs.size()) {
    fail(ErrorKind::kInvariant, "operator '" + o.id + "' evaluated with " + std::to_string(inputs.size()) + " operands");
  }
  switch (o.kind) {
    case OpKind::kLinear: {
      const ParamTensor* bias = m.param(op, "bias");
      return kernels::linear(*inputs[0], m.param(op, "weight")->matrix(),
                             bias ? std::span<const float>(bias->values) : std::span<const float>{});
    }
    case OpKind::kReLU: return kernels::relu(*inputs[0]);
    case OpKind::kLeakyReLU: return kernels::leaky_relu(*inputs[0]);
    case OpKind::kNorm: return kernels::l2_normalize(*inputs[0]);
    case OpKind::kAdd: return kernels::add(inputs);
    case OpKind::kConcat: return kernels::concat(inputs);
    case OpKind::kDropoutIdentity:
    case OpKind::kOutput: return *inputs[0];
    case OpKind::kInput:
    case OpKind::kConvMean:
    case OpKind::kConvAttn: break;
  }
  fail(ErrorKind::kInvariant, "operator '" + o.id + "' is not a per-node operator");
}

DenseMat eval_conv(const ModelGraph& m, std::size_t op, const BatchCsc& bc, const DenseMat& h_in) {
  const Operator& o = m.op(op);
  if (o.kind == OpKind::kConvMean) {
    DenseMat mean = kernels::agg_mean(bc, h_in);
    const ParamTensor* weight = m.param(op, "weight");
    if (!weight) return mean;
    const ParamTensor* bias = m.param(op, "bias");
    return kernels::linear(mean, weight->matrix(), bias ? std::span<const float>(bias->values) : std::span<const float>{});
  }
  if (o.kind == OpKind::kConvAttn) {
    const ParamTensor& weight = *m.param(op, "weight");
    const ParamTensor& attn = *m.param(op, "attn");
    std::vector<kernels::AttnHead> heads;
    for (std::size_t h = 0; h < weight.shape[0]; ++h) {
      heads.push_back({weight.matrix(h), std::span<const float>(attn.values).subspan(h * attn.shape[1], attn.shape[1])});
    }
    return kernels::agg_attn(bc, h_in, heads);
  }
  fail(ErrorKind::kInvariant, "operator '" + o.id + "' is not a Conv");
}

EmbeddingStore eval_reference(const ModelGraph& m, const LayerGraphs& graphs, const EmbeddingStore& x) {
  const std::uint64_t n = graphs.num_nodes();
  if (x.rows() != n || x.dim() != m.input_dim()) {
    fail(ErrorKind::kShape, "features are " + std::to_string(x.rows()) + "x" + std::to_string(x.dim()) + ", model expects " +
                                std::to_string(n) + "x" + std::to_string(m.input_dim()));
  }
  std::vector<DenseMat> values(m.size());
  std::map<int, BatchCsc> batches;
  for (const auto i : m.topo_order()) {
    const Operator& o = m.op(i);
    if (o.kind == OpKind::kInput) {
      values[i] = x.to_matrix();
    } else if (is_conv(o.kind)) {
      const int l = m.layer_of(i);
      auto it = batches.find(l);
      if (it == batches.end()) it = batches.emplace(l, whole_graph_batch(graphs.at(static_cast<std::size_t>(l)))).first;
      values[i] = eval_conv(m, i, it->second, values[m.producers(i).front()]);
    } else {
      std::vector<const DenseMat*> operands;
      for (const auto p : m.producers(i)) operands.push_back(&values[p]);
      values[i] = eval_normal(m, i, operands);
    }
  }
  return EmbeddingStore::from_matrix(values[m.output_index()]);
}

EmbeddingStore eval_reference(const ModelGraph& m, const CscGraph& g, const EmbeddingStore& x) {
  // Non-owning alias: the graph outlives this call.
  return eval_reference(m, LayerGraphs(std::shared_ptr<const CscGraph>(&g, [](const CscGraph*) {})), x);
}

}  // namespace lwgnn
