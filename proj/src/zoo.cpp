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

#include "lwgnn/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "lwgnn/error.hpp"
#include "lwgnn/random.hpp"

namespace lwgnn {

ModelBuilder::ModelBuilder(std::size_t input_dim, std::uint64_t seed) : input_dim_(input_dim), seed_(seed) {
  ops_.push_back({input_, OpKind::kInput, {}, {}});
  dims_[input_] = input_dim;
}

ParamTensor ModelBuilder::random_tensor(std::vector<std::uint32_t> shape, std::size_t fan_in) {
  std::size_t count = 1;
  for (const auto d : shape) count *= d;
  Rng rng(mix_seed(seed_, draws_++));
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  ParamTensor t{std::move(shape), std::vector<float>(count)};
  for (auto& v : t.values) v = static_cast<float>(rng.normal() * scale);
  return t;
}

std::string ModelBuilder::bind(Operator& o, const std::string& role, ParamTensor t) {
  const std::string name = o.id + "." + role;
  params_[name] = std::move(t);
  o.params[role] = name;
  return name;
}

std::string ModelBuilder::conv_mean(const std::string& id, const std::string& in, std::size_t out_dim, bool bias) {
  Operator o{id, OpKind::kConvMean, {in}, {}};
  const std::size_t in_dim = dims_.at(in);
  if (out_dim > 0) {
    bind(o, "weight", random_tensor({static_cast<std::uint32_t>(out_dim), static_cast<std::uint32_t>(in_dim)}, in_dim));
    if (bias) bind(o, "bias", random_tensor({static_cast<std::uint32_t>(out_dim)}, in_dim));
  }
  dims_[id] = out_dim > 0 ? out_dim : in_dim;
  ops_.push_back(std::move(o));
  return id;
}

std::string ModelBuilder::conv_attn(const std::string& id, const std::string& in, std::size_t heads, std::size_t head_dim) {
  Operator o{id, OpKind::kConvAttn, {in}, {}};
  const std::size_t in_dim = dims_.at(in);
  const auto h = static_cast<std::uint32_t>(heads);
  const auto d = static_cast<std::uint32_t>(head_dim);
  bind(o, "weight", random_tensor({h, d, static_cast<std::uint32_t>(in_dim)}, in_dim));
  bind(o, "attn", random_tensor({h, 2 * d}, head_dim));
  dims_[id] = heads * head_dim;
  ops_.push_back(std::move(o));
  return id;
}

std::string ModelBuilder::linear(const std::string& id, const std::string& in, std::size_t out_dim, bool bias) {
  Operator o{id, OpKind::kLinear, {in}, {}};
  const std::size_t in_dim = dims_.at(in);
  bind(o, "weight", random_tensor({static_cast<std::uint32_t>(out_dim), static_cast<std::uint32_t>(in_dim)}, in_dim));
  if (bias) bind(o, "bias", random_tensor({static_cast<std::uint32_t>(out_dim)}, in_dim));
  dims_[id] = out_dim;
  ops_.push_back(std::move(o));
  return id;
}

std::string ModelBuilder::op(const std::string& id, OpKind kind, std::vector<std::string> inputs) {
  std::size_t d = dims_.at(inputs.front());
  if (kind == OpKind::kConcat) {
    d = 0;
    for (const auto& in : inputs) d += dims_.at(in);
  }
  dims_[id] = d;
  ops_.push_back({id, kind, std::move(inputs), {}});
  return id;
}

std::string ModelBuilder::output(const std::string& id, const std::string& in) { return op(id, OpKind::kOutput, {in}); }

ModelGraph ModelBuilder::build(const std::string& output_id) const {
  return ModelGraph::build(input_dim_, ops_, params_, output_id);
}

std::vector<std::string> zoo_names() { return {"gcn", "gat", "jknet", "residual", "linear", "diamond", "branch", "chain"}; }

ModelGraph make_model(std::string_view name, const ZooOptions& o) {
  ModelBuilder b(o.input_dim, o.seed);
  std::string h = b.input();
  if (name == "gcn") {
    if (o.layers < 1) fail(ErrorKind::kConfig, "gcn needs at least one layer");
    for (int l = 1; l <= o.layers; ++l) {
      const std::string k = std::to_string(l);
      h = b.conv_mean("conv" + k, h, l == o.layers ? o.out_dim : o.hidden);
      if (l < o.layers) h = b.op("relu" + k, OpKind::kReLU, {h});
    }
  } else if (name == "gat") {
    if (o.layers < 1) fail(ErrorKind::kConfig, "gat needs at least one layer");
    for (int l = 1; l <= o.layers; ++l) {
      const std::string k = std::to_string(l);
      const std::size_t width = l == o.layers ? o.out_dim : o.hidden;
      h = b.conv_attn("gat" + k, h, o.heads, std::max<std::size_t>(1, width / o.heads));
      if (l < o.layers) h = b.op("act" + k, OpKind::kLeakyReLU, {h});
    }
  } else if (name == "jknet") {
    if (o.layers < 1) fail(ErrorKind::kConfig, "jknet needs at least one layer");
    std::vector<std::string> jumps;
    for (int l = 1; l <= o.layers; ++l) {
      const std::string k = std::to_string(l);
      h = b.conv_mean("conv" + k, h, o.hidden);
      h = b.op("relu" + k, OpKind::kReLU, {h});
      h = b.op("dropout" + k, OpKind::kDropoutIdentity, {h});
      jumps.push_back(h);
    }
    h = b.op("jump", OpKind::kConcat, jumps);
    h = b.conv_mean("final", h, o.out_dim);
  } else if (name == "residual") {
    const std::string lin = b.linear("lin0", h, o.hidden);
    const std::string c1 = b.conv_mean("c1", lin, o.hidden);
    const std::string r1 = b.op("r1", OpKind::kReLU, {c1});
    const std::string a1 = b.op("a1", OpKind::kAdd, {r1, lin});
    const std::string c2 = b.conv_mean("c2", a1, o.hidden);
    h = b.op("a2", OpKind::kAdd, {c2, a1});
  } else if (name == "linear") {
    h = b.linear("lin", h, o.out_dim);
  } else if (name == "diamond") {
    const std::string c1 = b.conv_mean("conv1", h, o.hidden);
    const std::string c2 = b.conv_mean("conv2", c1, o.hidden);
    const std::string c3 = b.conv_mean("conv3", c1, o.hidden);
    h = b.op("concat", OpKind::kConcat, {c2, c3});
  } else if (name == "branch") {
    const std::string c1 = b.conv_mean("conv1", h, o.hidden);
    const std::string relu = b.op("relu", OpKind::kReLU, {c1});
    const std::string norm = b.op("norm", OpKind::kNorm, {c1});
    const std::string c2 = b.conv_mean("conv2", relu, o.hidden);
    const std::string c3 = b.conv_mean("conv3", norm, o.hidden);
    h = b.op("concat", OpKind::kConcat, {c2, c3});
  } else if (name == "chain") {
    const std::string c1 = b.conv_mean("conv1", h, o.hidden);
    const std::string relu = b.op("relu", OpKind::kReLU, {c1});
    h = b.conv_mean("conv2", relu, o.out_dim);
  } else {
    fail(ErrorKind::kConfig, "unknown model '" + std::string(name) + "'");
  }
  b.output("out", h);
  return b.build("out");
}

}  // namespace lwgnn
