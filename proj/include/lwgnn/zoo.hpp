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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lwgnn/model.hpp"

namespace lwgnn {

/// Assembles an operator list with randomly initialized parameters
/// (normal, scaled by 1/sqrt(fan-in)). Each method returns the new operator id.
class ModelBuilder {
 public:
  ModelBuilder(std::size_t input_dim, std::uint64_t seed);

  const std::string& input() const { return input_; }
  /// `out_dim` == 0 leaves the mean unweighted.
  std::string conv_mean(const std::string& id, const std::string& in, std::size_t out_dim, bool bias = true);
  std::string conv_attn(const std::string& id, const std::string& in, std::size_t heads, std::size_t head_dim);
  std::string linear(const std::string& id, const std::string& in, std::size_t out_dim, bool bias = true);
  std::string op(const std::string& id, OpKind kind, std::vector<std::string> inputs);
  std::string output(const std::string& id, const std::string& in);

  std::size_t dim(const std::string& id) const { return dims_.at(id); }
  const std::vector<Operator>& operators() const { return ops_; }
  ModelGraph build(const std::string& output_id) const;

 private:
  ParamTensor random_tensor(std::vector<std::uint32_t> shape, std::size_t fan_in);
  std::string bind(Operator& o, const std::string& role, ParamTensor t);

  std::size_t input_dim_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::string input_ = "x";
  std::vector<Operator> ops_;
  ParamSet params_;
  std::map<std::string, std::size_t> dims_;
};

struct ZooOptions {
  int layers = 2;
  std::size_t input_dim = 16;
  std::size_t hidden = 16;
  std::size_t out_dim = 8;
  std::size_t heads = 2;
  std::uint64_t seed = 0;
};

/// Named models: gcn, gat, jknet, residual, linear, diamond, branch, chain.
ModelGraph make_model(std::string_view name, const ZooOptions& options = {});
std::vector<std::string> zoo_names();

}  // namespace lwgnn
