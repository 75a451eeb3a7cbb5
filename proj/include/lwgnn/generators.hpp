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

#include "lwgnn/dense.hpp"
#include "lwgnn/graph.hpp"

namespace lwgnn::gen {

/// Every node gets `degree` distinct in-neighbors drawn uniformly from the
/// other nodes; slices are sorted.
CscGraph regular(std::uint64_t n, std::uint64_t degree, std::uint64_t seed);

/// Preferential attachment: node i draws min(m, i) distinct in-neighbors
/// among 0..i-1 with probability proportional to out-degree + 1. In-degrees
/// stay at m while out-degrees follow a power law.
CscGraph powerlaw(std::uint64_t n, std::uint64_t m, std::uint64_t seed);

/// Stochastic block model with contiguous blocks: each ordered pair u != v
/// is an edge with probability p_in inside a block, p_out across blocks.
CscGraph sbm(std::uint64_t blocks, std::uint64_t block_size, double p_in, double p_out, std::uint64_t seed);

/// Symmetric chain 0 - 1 - ... - (n-1).
CscGraph path(std::uint64_t n);

/// Six nodes A..F = 0..5 with A <- {C, D}, B <- {C, D}, C <- {E, F}.
CscGraph toy();

/// n x dim standard-normal features.
DenseMat features(std::uint64_t n, std::size_t dim, std::uint64_t seed);

}  // namespace lwgnn::gen
