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

#include "lwgnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "lwgnn/error.hpp"

namespace lwgnn {

DenseMat::DenseMat(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    fail(ErrorKind::kShape, "matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                                std::to_string(values_.size()) + " values");
  }
}

BatchCsc build_batch(const CscGraph& g, std::span<const NodeId> targets) {
  BatchCsc bc;
  bc.targets.assign(targets.begin(), targets.end());
  bc.inputs.assign(targets.begin(), targets.end());
  std::unordered_map<NodeId, std::size_t> position;
  position.reserve(targets.size() * 4);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!position.emplace(targets[i], i).second) {
      fail(ErrorKind::kInvariant, "duplicate target " + std::to_string(targets[i]) + " in batch");
    }
  }
  bc.self_pos.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) bc.self_pos[i] = i;
  bc.indptr.reserve(targets.size() + 1);
  bc.indptr.push_back(0);
  for (const NodeId v : targets) {
    for (const NodeId u : g.in_neighbors(v)) {
      auto [it, inserted] = position.emplace(u, bc.inputs.size());
      if (inserted) bc.inputs.push_back(u);
      bc.indices.push_back(it->second);
    }
    bc.indptr.push_back(bc.indices.size());
  }
  return bc;
}

BatchCsc whole_graph_batch(const CscGraph& g) {
  BatchCsc bc;
  const std::size_t n = g.num_nodes();
  bc.targets.resize(n);
  for (std::size_t v = 0; v < n; ++v) bc.targets[v] = v;
  bc.inputs = bc.targets;
  bc.self_pos.assign(bc.targets.begin(), bc.targets.end());
  bc.indptr.assign(g.indptr().begin(), g.indptr().end());
  bc.indices.assign(g.indices().begin(), g.indices().end());
  return bc;
}

void validate_batch(const BatchCsc& bc) {
  if (bc.indptr.size() != bc.targets.size() + 1 || bc.self_pos.size() != bc.targets.size() || bc.indptr.front() != 0 ||
      bc.indptr.back() != bc.indices.size()) {
    fail(ErrorKind::kInvariant, "batch CSC arrays have inconsistent sizes");
  }
  for (std::size_t i = 0; i < bc.targets.size(); ++i) {
    if (bc.self_pos[i] >= bc.inputs.size() || bc.inputs[bc.self_pos[i]] != bc.targets[i]) {
      fail(ErrorKind::kInvariant, "target " + std::to_string(bc.targets[i]) + " missing from batch inputs");
    }
  }
  for (const auto p : bc.indices) {
    if (p >= bc.inputs.size()) fail(ErrorKind::kInvariant, "local index " + std::to_string(p) + " out of range");
  }
}

namespace kernels {

namespace {

void require_rows(const BatchCsc& bc, const DenseMat& h_in) {
  if (h_in.rows() != bc.inputs.size()) {
    fail(ErrorKind::kShape, "aggregation input has " + std::to_string(h_in.rows()) + " rows, batch has " +
                                std::to_string(bc.inputs.size()) + " inputs");
  }
}

}  // namespace

DenseMat linear(const DenseMat& x, const MatView& weight, std::span<const float> bias) {
  if (x.cols() != weight.cols) {
    fail(ErrorKind::kShape, "linear: input dim " + std::to_string(x.cols()) + " != weight cols " + std::to_string(weight.cols));
  }
  if (!bias.empty() && bias.size() != weight.rows) {
    fail(ErrorKind::kShape, "linear: bias length " + std::to_string(bias.size()) + " != weight rows " + std::to_string(weight.rows));
  }
  DenseMat out(x.rows(), weight.rows);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    auto oi = out.row(i);
    for (std::size_t o = 0; o < weight.rows; ++o) {
      const auto w = weight.row(o);
      float acc = 0.0f;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * xi[k];
      oi[o] = bias.empty() ? acc : acc + bias[o];
    }
  }
  return out;
}

DenseMat agg_mean(const BatchCsc& bc, const DenseMat& h_in) {
  require_rows(bc, h_in);
  const std::size_t d = h_in.cols();
  DenseMat out(bc.targets.size(), d);
  for (std::size_t t = 0; t < bc.targets.size(); ++t) {
    auto acc = out.row(t);
    for (std::size_t e = bc.indptr[t]; e < bc.indptr[t + 1]; ++e) {
      const auto src = h_in.row(bc.indices[e]);
      for (std::size_t c = 0; c < d; ++c) acc[c] += src[c];
    }
    const auto self = h_in.row(bc.self_pos[t]);
    for (std::size_t c = 0; c < d; ++c) acc[c] += self[c];
    const auto count = static_cast<float>(bc.indptr[t + 1] - bc.indptr[t] + 1);
    for (std::size_t c = 0; c < d; ++c) acc[c] /= count;
  }
  return out;
}

DenseMat agg_attn(const BatchCsc& bc, const DenseMat& h_in, std::span<const AttnHead> heads) {
  require_rows(bc, h_in);
  std::size_t total = 0;
  for (const auto& head : heads) {
    if (head.attn.size() != 2 * head.weight.rows) {
      fail(ErrorKind::kShape, "attention vector length " + std::to_string(head.attn.size()) + " != 2 x head dim " +
                                  std::to_string(head.weight.rows));
    }
    total += head.weight.rows;
  }
  DenseMat out(bc.targets.size(), total);
  std::vector<float> logits;
  std::size_t col0 = 0;
  for (const auto& head : heads) {
    const DenseMat z = linear(h_in, head.weight, {});
    const std::size_t d = z.cols();
    const auto a_src = head.attn.first(d);
    const auto a_dst = head.attn.subspan(d, d);
    for (std::size_t t = 0; t < bc.targets.size(); ++t) {
      const std::size_t begin = bc.indptr[t];
      const std::size_t end = bc.indptr[t + 1];
      const auto zv = z.row(bc.self_pos[t]);
      auto logit = [&](std::size_t pos) {
        const auto zu = z.row(pos);
        float acc = 0.0f;
        for (std::size_t k = 0; k < d; ++k) acc += a_src[k] * zu[k];
        for (std::size_t k = 0; k < d; ++k) acc += a_dst[k] * zv[k];
        return acc > 0.0f ? acc : kLeakySlope * acc;
      };
      logits.clear();
      for (std::size_t e = begin; e < end; ++e) logits.push_back(logit(bc.indices[e]));
      logits.push_back(logit(bc.self_pos[t]));
      const float peak = *std::max_element(logits.begin(), logits.end());
      float denom = 0.0f;
      for (auto& l : logits) {
        l = std::exp(l - peak);
        denom += l;
      }
      auto o = out.row(t).subspan(col0, d);
      auto accumulate = [&](std::size_t pos, float weight) {
        const auto zu = z.row(pos);
        for (std::size_t k = 0; k < d; ++k) o[k] += weight * zu[k];
      };
      for (std::size_t e = begin; e < end; ++e) accumulate(bc.indices[e], logits[e - begin] / denom);
      accumulate(bc.self_pos[t], logits.back() / denom);
    }
    col0 += d;
  }
  return out;
}

DenseMat relu(const DenseMat& x) {
  DenseMat out = x;
  for (auto& v : out.values()) v = v > 0.0f ? v : 0.0f;
  return out;
}

DenseMat leaky_relu(const DenseMat& x, float slope) {
  DenseMat out = x;
  for (auto& v : out.values()) v = v > 0.0f ? v : slope * v;
  return out;
}

DenseMat add(std::span<const DenseMat* const> parts) {
  if (parts.empty()) fail(ErrorKind::kShape, "add: no operands");
  DenseMat out = *parts[0];
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const DenseMat& x = *parts[p];
    if (x.rows() != out.rows() || x.cols() != out.cols()) {
      fail(ErrorKind::kShape, "add: operand " + std::to_string(p) + " is " + std::to_string(x.rows()) + "x" +
                                  std::to_string(x.cols()) + ", expected " + std::to_string(out.rows()) + "x" +
                                  std::to_string(out.cols()));
    }
    auto dst = out.values();
    const auto src = x.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

DenseMat l2_normalize(const DenseMat& x, float eps) {
  DenseMat out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    float sq = 0.0f;
    for (const float v : r) sq += v * v;
    const float norm = std::max(std::sqrt(sq), eps);
    for (auto& v : r) v /= norm;
  }
  return out;
}

DenseMat concat(std::span<const DenseMat* const> parts) {
  if (parts.empty()) fail(ErrorKind::kShape, "concat: no operands");
  const std::size_t rows = parts[0]->rows();
  std::size_t cols = 0;
  for (const auto* p : parts) {
    if (p->rows() != rows) {
      fail(ErrorKind::kShape, "concat: row mismatch " + std::to_string(p->rows()) + " vs " + std::to_string(rows));
    }
    cols += p->cols();
  }
  DenseMat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto dst = out.row(i);
    std::size_t at = 0;
    for (const auto* p : parts) {
      const auto src = p->row(i);
      std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(at));
      at += src.size();
    }
  }
  return out;
}

DenseMat take_rows(const DenseMat& x, std::span<const std::size_t> rows) {
  DenseMat out(rows.size(), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= x.rows()) fail(ErrorKind::kBounds, "row " + std::to_string(rows[k]) + " out of range");
    const auto src = x.row(rows[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

}  // namespace kernels
}  // namespace lwgnn
