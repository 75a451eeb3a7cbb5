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

#include "fixtures.hpp"

#include <algorithm>
#include <cstring>

#include "lwgnn/random.hpp"
#include "lwgnn/zoo.hpp"

namespace lwgnn::testing {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lwgnn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

EmbeddingStore random_features(std::uint64_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  DenseMat x(n, dim);
  for (auto& v : x.values()) v = static_cast<float>(rng.normal());
  return EmbeddingStore::from_matrix(x);
}

EmbeddingStore column_features(std::span<const float> values) {
  return EmbeddingStore::from_matrix(DenseMat(values.size(), 1, std::vector<float>(values.begin(), values.end())));
}

ModelGraph plain_mean_model() {
  ModelBuilder b(1, 0);
  b.conv_mean("conv", b.input(), 0);
  b.output("out", "conv");
  return b.build("out");
}

ModelGraph random_model(std::uint64_t seed, std::size_t max_ops, std::size_t dim) {
  Rng rng(seed);
  ModelBuilder b(dim, mix_seed(seed, 99));
  std::vector<std::string> pool{b.input()};
  const auto pick = [&]() -> std::string {
    if (rng.below(10) < 7) {
      const std::size_t window = std::min<std::size_t>(pool.size(), 3);
      return pool[pool.size() - 1 - rng.below(window)];
    }
    return pool[rng.below(pool.size())];
  };
  const std::size_t budget = max_ops - 2;  // Input and Output
  const std::size_t target = 2 + rng.below(budget - 1);
  std::size_t used = 0;
  int k = 0;
  while (used < target) {
    const std::string id = "op" + std::to_string(k++);
    const auto roll = rng.below(100);
    if (roll < 30) {
      pool.push_back(b.conv_mean(id, pick(), rng.below(2) ? dim : 0));
    } else if (roll < 36) {
      pool.push_back(b.conv_attn(id, pick(), 2, dim / 2));
    } else if (roll < 50) {
      pool.push_back(b.op(id, OpKind::kReLU, {pick()}));
    } else if (roll < 58) {
      pool.push_back(b.op(id, OpKind::kNorm, {pick()}));
    } else if (roll < 72) {
      pool.push_back(b.op(id, OpKind::kAdd, {pick(), pick()}));
    } else if (roll < 80) {
      pool.push_back(b.linear(id, pick(), dim));
    } else if (roll < 86) {
      pool.push_back(b.op(id, OpKind::kDropoutIdentity, {pick()}));
    } else if (roll < 92) {
      pool.push_back(b.op(id, OpKind::kLeakyReLU, {pick()}));
    } else if (used + 2 <= target) {
      const std::string cat = b.op(id, OpKind::kConcat, {pick(), pick()});
      pool.push_back(b.linear(id + "p", cat, dim));
      ++used;
    } else {
      continue;
    }
    ++used;
  }
  b.output("out", pool.back());
  return b.build("out");
}

CscGraph random_graph(std::uint64_t n, std::uint64_t max_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> indptr{0};
  std::vector<NodeId> indices;
  for (NodeId v = 0; v < n; ++v) {
    const auto deg = rng.below(max_degree + 1);
    for (std::uint64_t k = 0; k < deg; ++k) indices.push_back(rng.below(n));
    indptr.push_back(indices.size());
  }
  return CscGraph(std::move(indptr), std::move(indices));
}

bool same_bytes(const DenseMat& a, const DenseMat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.values().data(), b.values().data(), a.values().size_bytes()) == 0;
}

}  // namespace lwgnn::testing
