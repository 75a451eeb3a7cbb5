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

#include "lwgnn/generators.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "lwgnn/error.hpp"
#include "lwgnn/random.hpp"

namespace lwgnn::gen {

namespace {

CscGraph from_slices(const std::vector<std::vector<NodeId>>& slices) {
  std::vector<std::uint64_t> indptr{0};
  std::vector<NodeId> indices;
  for (const auto& s : slices) {
    indices.insert(indices.end(), s.begin(), s.end());
    indptr.push_back(indices.size());
  }
  return CscGraph(std::move(indptr), std::move(indices));
}

bool contains(const std::vector<NodeId>& v, NodeId x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

CscGraph regular(std::uint64_t n, std::uint64_t degree, std::uint64_t seed) {
  if (n > 0 && degree >= n) {
    fail(ErrorKind::kConfig, "regular graph: degree " + std::to_string(degree) + " needs more than " + std::to_string(n) + " nodes");
  }
  Rng rng(seed);
  std::vector<std::vector<NodeId>> slices(n);
  for (NodeId v = 0; v < n; ++v) {
    auto& s = slices[v];
    while (s.size() < degree) {
      const NodeId u = rng.below(n);
      if (u != v && !contains(s, u)) s.push_back(u);
    }
    std::sort(s.begin(), s.end());
  }
  return from_slices(slices);
}

CscGraph powerlaw(std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  if (m == 0) fail(ErrorKind::kConfig, "powerlaw graph: m must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<NodeId>> slices(n);
  std::vector<NodeId> pool;  // node j appears degree(j) + 1 times
  std::vector<NodeId> picked;
  for (NodeId i = 0; i < n; ++i) {
    const std::uint64_t want = std::min<std::uint64_t>(m, i);
    picked.clear();
    while (picked.size() < want) {
      const NodeId u = pool[rng.below(pool.size())];
      if (!contains(picked, u)) picked.push_back(u);
    }
    // Undirected attachment: both directions are stored.
    for (NodeId u : picked) {
      slices[i].push_back(u);
      slices[u].push_back(i);
    }
    pool.insert(pool.end(), picked.begin(), picked.end());
    pool.insert(pool.end(), want + 1, i);
  }
  for (auto& s : slices) std::sort(s.begin(), s.end());
  return from_slices(slices);
}

CscGraph sbm(std::uint64_t blocks, std::uint64_t block_size, double p_in, double p_out, std::uint64_t seed) {
  if (block_size == 0 || p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1) {
    fail(ErrorKind::kConfig, "sbm: need block_size >= 1 and probabilities in [0, 1]");
  }
  const std::uint64_t n = blocks * block_size;
  Rng rng(seed);
  std::vector<std::vector<NodeId>> slices(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = 0; u < n; ++u) {
      if (u == v) continue;
      const double p = u / block_size == v / block_size ? p_in : p_out;
      if (rng.uniform() < p) slices[v].push_back(u);
    }
  }
  return from_slices(slices);
}

CscGraph path(std::uint64_t n) {
  std::vector<std::vector<NodeId>> slices(n);
  for (NodeId v = 0; v < n; ++v) {
    if (v > 0) slices[v].push_back(v - 1);
    if (v + 1 < n) slices[v].push_back(v + 1);
  }
  return from_slices(slices);
}

CscGraph toy() { return CscGraph({0, 2, 4, 6, 6, 6, 6}, {2, 3, 2, 3, 4, 5}); }

DenseMat features(std::uint64_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  DenseMat x(n, dim);
  for (auto& value : x.values()) value = static_cast<float>(rng.normal());
  return x;
}

}  // namespace lwgnn::gen
