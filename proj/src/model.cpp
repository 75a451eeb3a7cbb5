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

#include "lwgnn/model.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

#include "json.hpp"

#include "binary_io.hpp"
#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {

constexpr std::pair<OpKind, std::string_view> kKindNames[] = {
    {OpKind::kInput, "Input"},       {OpKind::kConvMean, "ConvMean"},
    {OpKind::kConvAttn, "ConvAttn"}, {OpKind::kLinear, "Linear"},
    {OpKind::kReLU, "ReLU"},         {OpKind::kLeakyReLU, "LeakyReLU"},
    {OpKind::kAdd, "Add"},           {OpKind::kConcat, "Concat"},
    {OpKind::kNorm, "Norm"},         {OpKind::kDropoutIdentity, "DropoutIdentity"},
    {OpKind::kOutput, "Output"},
};

constexpr char kParamMagic[] = "DGIW";
constexpr std::uint32_t kParamVersion = 1;
constexpr int kModelVersion = 1;

[[noreturn]] void format_error(const std::string& msg) { fail(ErrorKind::kFormat, msg); }

std::unordered_map<std::string, std::size_t> index_ops(std::span<const Operator> ops) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].id.empty()) format_error("operator " + std::to_string(i) + " has an empty id");
    if (!index.emplace(ops[i].id, i).second) format_error("duplicate operator id '" + ops[i].id + "'");
  }
  return index;
}

std::vector<std::vector<std::size_t>> resolve_producers(std::span<const Operator> ops,
                                                        const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::vector<std::size_t>> producers(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (const auto& in : ops[i].inputs) {
      const auto it = index.find(in);
      if (it == index.end()) format_error("operator '" + ops[i].id + "' reads unknown operator '" + in + "'");
      producers[i].push_back(it->second);
    }
  }
  return producers;
}

// Returns the ids along one cycle, first id repeated at the end.
std::vector<std::string> find_cycle(std::span<const Operator> ops, const std::vector<std::vector<std::size_t>>& producers) {
  enum : char { kWhite, kGrey, kBlack };
  std::vector<char> colour(ops.size(), kWhite);
  std::vector<std::size_t> stack;
  std::vector<std::string> cycle;
  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    colour[v] = kGrey;
    stack.push_back(v);
    for (const auto p : producers[v]) {
      if (colour[p] == kGrey) {
        // The stack walks consumer -> producer; report in data-flow order.
        const auto from = std::find(stack.begin(), stack.end(), p);
        cycle.push_back(ops[p].id);
        for (auto it = stack.end(); it != from + 1;) cycle.push_back(ops[*--it].id);
        cycle.push_back(ops[p].id);
        return true;
      }
      if (colour[p] == kWhite && visit(p)) return true;
    }
    stack.pop_back();
    colour[v] = kBlack;
    return false;
  };
  for (std::size_t v = 0; v < ops.size(); ++v) {
    if (colour[v] == kWhite && visit(v)) break;
  }
  return cycle;
}

std::vector<std::size_t> kahn(std::span<const Operator> ops, const std::vector<std::vector<std::size_t>>& producers) {
  std::vector<std::size_t> pending(ops.size(), 0);
  std::vector<std::vector<std::size_t>> consumers(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    // Repeated inputs (Add(x, x)) count once per edge on both sides.
    pending[i] = producers[i].size();
    for (const auto p : producers[i]) consumers[p].push_back(i);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(ops.size());
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const auto c : consumers[v]) {
      if (--pending[c] == 0) ready.push(c);
    }
  }
  if (order.size() != ops.size()) {
    std::string text;
    for (const auto& id : find_cycle(ops, producers)) text += (text.empty() ? "" : " -> ") + id;
    format_error("cycle detected: " + text);
  }
  return order;
}

std::string dims_text(const std::vector<std::uint32_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

std::string_view to_string(OpKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

MatView ParamTensor::matrix(std::size_t index) const {
  if (rank() == 2 && index == 0) return {shape[0], shape[1], values};
  if (rank() == 3 && index < shape[0]) {
    const std::size_t step = std::size_t{shape[1]} * shape[2];
    return {shape[1], shape[2], std::span<const float>(values).subspan(index * step, step)};
  }
  fail(ErrorKind::kShape, "tensor of shape " + dims_text(shape) + " has no matrix slice " + std::to_string(index));
}

// ---------------------------------------------------------------------------
// Parameter file

std::vector<std::uint8_t> encode_params(const ParamSet& params) {
  io::ByteWriter w;
  w.magic(kParamMagic);
  w.u32(kParamVersion);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    if (name.size() > UINT16_MAX) fail(ErrorKind::kFormat, "parameter name too long: " + name.substr(0, 32));
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.raw(name);
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (const auto d : t.shape) w.u32(d);
    w.array<float>(t.values);
  }
  return w.bytes();
}

ParamSet decode_params(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic(kParamMagic);
  if (const auto version = r.u32("version"); version != kParamVersion) {
    r.fail_at(4, "unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32("tensor count");
  ParamSet params;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::size_t at = r.offset();
    const std::uint16_t len = r.u16("name length");
    std::string name = r.raw(len, "name");
    ParamTensor tensor;
    const std::uint8_t rank = r.u8("rank");
    std::uint64_t elements = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      tensor.shape.push_back(r.u32("dim"));
      elements *= tensor.shape.back();
    }
    tensor.values = r.array<float>(elements, "tensor data");
    if (!params.emplace(name, std::move(tensor)).second) r.fail_at(at, "duplicate tensor '" + name + "'");
  }
  r.expect_end();
  return params;
}

ParamSet load_params(const std::filesystem::path& path) { return decode_params(io::read_file(path), path.string()); }

void write_params(const ParamSet& params, const std::filesystem::path& path) { io::write_file(path, encode_params(params)); }

// ---------------------------------------------------------------------------
// Structure

std::vector<std::size_t> topological_order(std::span<const Operator> ops) {
  const auto index = index_ops(ops);
  return kahn(ops, resolve_producers(ops, index));
}

std::map<std::string, int> assign_layers(std::span<const Operator> ops, std::span<const std::size_t> topo_order) {
  const auto index = index_ops(ops);
  const auto producers = resolve_producers(ops, index);
  if (topo_order.size() != ops.size()) fail(ErrorKind::kInvariant, "topological order has the wrong length");
  std::vector<int> position(ops.size(), -1);
  for (std::size_t k = 0; k < topo_order.size(); ++k) {
    if (topo_order[k] >= ops.size() || position[topo_order[k]] != -1) {
      fail(ErrorKind::kInvariant, "topological order is not a permutation");
    }
    position[topo_order[k]] = static_cast<int>(k);
  }
  // carried[i]: largest Conv layer among the Conv ancestors of i (0 if none).
  std::vector<int> carried(ops.size(), 0);
  std::vector<int> layer(ops.size(), 0);
  std::map<std::string, int> out;
  for (const auto v : topo_order) {
    int best = 0;
    for (const auto p : producers[v]) {
      if (position[p] >= position[v]) {
        fail(ErrorKind::kInvariant, "'" + ops[p].id + "' does not precede its consumer '" + ops[v].id + "'");
      }
      best = std::max(best, is_conv(ops[p].kind) ? layer[p] : carried[p]);
    }
    carried[v] = best;
    if (is_conv(ops[v].kind)) {
      layer[v] = best + 1;
      out[ops[v].id] = layer[v];
    }
  }
  return out;
}

std::map<std::string, int> assign_layers(std::span<const Operator> ops) {
  const auto order = topological_order(ops);
  return assign_layers(ops, order);
}

ModelGraph ModelGraph::build(std::size_t input_dim, std::vector<Operator> ops, ParamSet params, std::string output) {
  ModelGraph m;
  m.input_dim_ = input_dim;
  m.ops_ = std::move(ops);
  m.params_ = std::move(params);
  const auto index = index_ops(m.ops_);
  for (const auto& [id, i] : index) m.index_.emplace(id, i);
  m.producers_ = resolve_producers(m.ops_, index);
  m.consumers_.assign(m.ops_.size(), {});
  for (std::size_t i = 0; i < m.ops_.size(); ++i) {
    for (const auto p : m.producers_[i]) {
      if (std::find(m.consumers_[p].begin(), m.consumers_[p].end(), i) == m.consumers_[p].end()) {
        m.consumers_[p].push_back(i);
      }
    }
  }
  m.topo_ = kahn(m.ops_, m.producers_);

  std::size_t inputs = 0;
  std::size_t outputs = 0;
  for (std::size_t i = 0; i < m.ops_.size(); ++i) {
    const Operator& op = m.ops_[i];
    const std::size_t arity = op.inputs.size();
    const auto need = [&](bool ok, const char* what) {
      if (!ok) format_error("operator '" + op.id + "' (" + std::string(to_string(op.kind)) + ") " + what);
    };
    switch (op.kind) {
      case OpKind::kInput:
        need(arity == 0, "takes no inputs");
        ++inputs;
        m.input_ = i;
        break;
      case OpKind::kAdd: need(arity >= 2, "needs at least two inputs"); break;
      case OpKind::kConcat: need(arity >= 1, "needs at least one input"); break;
      case OpKind::kOutput:
        need(arity == 1, "takes exactly one input");
        ++outputs;
        break;
      default: need(arity == 1, "takes exactly one input"); break;
    }
    for (const auto p : m.producers_[i]) {
      if (m.ops_[p].kind == OpKind::kOutput) format_error("operator '" + op.id + "' consumes Output '" + m.ops_[p].id + "'");
    }
    const bool parametric = op.kind == OpKind::kLinear || is_conv(op.kind);
    for (const auto& [role, name] : op.params) {
      const bool known = parametric && (role == "weight" || role == "bias" || (role == "attn" && op.kind == OpKind::kConvAttn));
      if (!known) format_error("operator '" + op.id + "' has unknown parameter role '" + role + "'");
      if (!m.params_.contains(name)) format_error("missing parameter '" + name + "' for operator '" + op.id + "'");
    }
  }
  if (inputs != 1) format_error("model must have exactly one Input operator, found " + std::to_string(inputs));
  if (outputs == 0) format_error("model has no Output operator");
  const auto out_it = m.index_.find(output);
  if (out_it == m.index_.end() || m.ops_[out_it->second].kind != OpKind::kOutput) {
    format_error("model output '" + output + "' is not an Output operator");
  }
  m.output_ = out_it->second;

  // Dimensions, in topological order.
  m.out_dims_.assign(m.ops_.size(), 0);
  for (const auto i : m.topo_) {
    const Operator& op = m.ops_[i];
    const auto& prods = m.producers_[i];
    const auto mismatch = [&](std::size_t p, const std::string& detail) {
      fail(ErrorKind::kShape, "dimension mismatch between '" + m.ops_[p].id + "' and '" + op.id + "': " + detail);
    };
    const auto in_dim = [&]() { return m.out_dims_[prods.front()]; };
    const auto required = [&](const char* role) -> const ParamTensor& {
      const ParamTensor* t = m.param(i, role);
      if (!t) format_error("missing parameter role '" + std::string(role) + "' for operator '" + op.id + "'");
      return *t;
    };
    const auto check_weight = [&](const ParamTensor& w) {
      if (w.rank() != 2) fail(ErrorKind::kShape, "weight of '" + op.id + "' must be rank 2, got " + dims_text(w.shape));
      if (w.shape[1] != in_dim()) {
        mismatch(prods.front(), "weight expects input dim " + std::to_string(w.shape[1]) + ", producer gives " + std::to_string(in_dim()));
      }
      return std::size_t{w.shape[0]};
    };
    const auto check_bias = [&](std::size_t out) {
      if (const ParamTensor* b = m.param(i, "bias"); b && (b->rank() != 1 || b->shape[0] != out)) {
        fail(ErrorKind::kShape, "bias of '" + op.id + "' has shape " + dims_text(b->shape) + ", expected [" + std::to_string(out) + "]");
      }
    };
    std::size_t dim = 0;
    switch (op.kind) {
      case OpKind::kInput: dim = m.input_dim_; break;
      case OpKind::kLinear:
        dim = check_weight(required("weight"));
        check_bias(dim);
        break;
      case OpKind::kConvMean:
        if (const ParamTensor* w = m.param(i, "weight")) {
          dim = check_weight(*w);
        } else {
          dim = in_dim();
          if (m.param(i, "bias")) format_error("ConvMean '" + op.id + "' has a bias without a weight");
        }
        check_bias(dim);
        break;
      case OpKind::kConvAttn: {
        const ParamTensor& w = required("weight");
        const ParamTensor& a = required("attn");
        if (w.rank() != 3 || w.shape[0] == 0) {
          fail(ErrorKind::kShape, "weight of '" + op.id + "' must be [heads, out, in], got " + dims_text(w.shape));
        }
        if (w.shape[2] != in_dim()) {
          mismatch(prods.front(), "attention weight expects input dim " + std::to_string(w.shape[2]) + ", producer gives " +
                                      std::to_string(in_dim()));
        }
        if (a.rank() != 2 || a.shape[0] != w.shape[0] || a.shape[1] != 2 * w.shape[1]) {
          fail(ErrorKind::kShape, "attn of '" + op.id + "' has shape " + dims_text(a.shape) + ", expected [" +
                                      std::to_string(w.shape[0]) + "," + std::to_string(2 * w.shape[1]) + "]");
        }
        if (m.param(i, "bias")) format_error("ConvAttn '" + op.id + "' does not take a bias");
        dim = std::size_t{w.shape[0]} * w.shape[1];
        break;
      }
      case OpKind::kAdd:
        dim = in_dim();
        for (const auto p : prods) {
          if (m.out_dims_[p] != dim) {
            mismatch(p, "Add operand dim " + std::to_string(m.out_dims_[p]) + " != " + std::to_string(dim));
          }
        }
        break;
      case OpKind::kConcat:
        for (const auto p : prods) dim += m.out_dims_[p];
        break;
      default: dim = in_dim(); break;
    }
    m.out_dims_[i] = dim;
  }

  const auto layers = assign_layers(m.ops_, m.topo_);
  m.layers_.assign(m.ops_.size(), 0);
  for (const auto& [id, l] : layers) {
    m.layers_[m.index_.at(id)] = l;
    m.depth_ = std::max(m.depth_, l);
  }
  return m;
}

std::size_t ModelGraph::index_of(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorKind::kFormat, "unknown operator '" + std::string(id) + "'");
  return it->second;
}

const ParamTensor* ModelGraph::param(std::size_t i, std::string_view role) const {
  const auto& bound = ops_[i].params;
  const auto it = bound.find(std::string(role));
  if (it == bound.end()) return nullptr;
  const auto t = params_.find(it->second);
  return t == params_.end() ? nullptr : &t->second;
}

// ---------------------------------------------------------------------------
// Model document

ModelGraph parse_model_document(std::string_view document, ParamSet params, const std::string& source) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    format_error(source + ": " + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kModelVersion) {
      format_error(source + ": unsupported model version " + doc.at("version").dump());
    }
    const auto input_dim = doc.at("input_dim").get<std::size_t>();
    std::vector<Operator> ops;
    for (const auto& node : doc.at("operators")) {
      Operator op;
      op.id = node.at("id").get<std::string>();
      const auto kind_name = node.at("kind").get<std::string>();
      const auto kind = parse_op_kind(kind_name);
      if (!kind) format_error(source + ": operator '" + op.id + "' has unknown kind '" + kind_name + "'");
      op.kind = *kind;
      if (node.contains("inputs")) op.inputs = node.at("inputs").get<std::vector<std::string>>();
      if (node.contains("params")) op.params = node.at("params").get<std::map<std::string, std::string>>();
      ops.push_back(std::move(op));
    }
    return ModelGraph::build(input_dim, std::move(ops), std::move(params), doc.at("output").get<std::string>());
  } catch (const json::exception& e) {
    format_error(source + ": " + e.what());
  }
}

ModelGraph parse_model(const std::filesystem::path& model_path, const std::filesystem::path& params_path) {
  const auto text = io::read_file(model_path);
  return parse_model_document(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()),
                              load_params(params_path), model_path.string());
}

std::string serialize_model(const ModelGraph& m) {
  nlohmann::ordered_json doc;
  doc["version"] = kModelVersion;
  doc["input_dim"] = m.input_dim();
  auto& ops = doc["operators"] = nlohmann::ordered_json::array();
  for (const auto& op : m.operators()) {
    nlohmann::ordered_json node;
    node["id"] = op.id;
    node["kind"] = std::string(to_string(op.kind));
    if (!op.inputs.empty()) node["inputs"] = op.inputs;
    if (!op.params.empty()) node["params"] = op.params;
    ops.push_back(std::move(node));
  }
  doc["output"] = m.output_id();
  return doc.dump(2) + "\n";
}

}  // namespace lwgnn
