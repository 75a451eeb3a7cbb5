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
#include <string>
#include <vector>

#include "lwgnn/dense.hpp"
#include "lwgnn/embedding_store.hpp"
#include "lwgnn/graph.hpp"
#include "lwgnn/model.hpp"

namespace lwgnn::testing {

// Node ids of the six-node toy graph.
enum Toy : NodeId { A = 0, B, C, D, E, F };

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

EmbeddingStore random_features(std::uint64_t n, std::size_t dim, std::uint64_t seed);
EmbeddingStore column_features(std::span<const float> values);

/// Input -> ConvMean (no weight) -> Output over 1-d features.
ModelGraph plain_mean_model();

/// Random valid operator DAG with at most `max_ops` operators (including
/// Input and Output), random parameters, uniform width `dim`.
ModelGraph random_model(std::uint64_t seed, std::size_t max_ops, std::size_t dim = 4);

/// Random graph with n nodes, each in-degree drawn from [0, max_degree],
/// neighbors in random (unsorted) order, possibly with self loops.
CscGraph random_graph(std::uint64_t n, std::uint64_t max_degree, std::uint64_t seed);

bool same_bytes(const DenseMat& a, const DenseMat& b);

}  // namespace lwgnn::testing
