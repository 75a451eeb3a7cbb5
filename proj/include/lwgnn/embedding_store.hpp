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
#include <limits>
#include <memory>
#include <optional>
#include <span>

#include "lwgnn/dense.hpp"
#include "lwgnn/graph.hpp"

namespace lwgnn {

enum class Backing { kMemory, kFile };

struct StoreOptions {
  /// Upper bound on rows * dim * 4 for a single store.
  std::uint64_t capacity_bytes = std::numeric_limits<std::uint64_t>::max();
};

class RowBackend;

/// An N x d float32 matrix of node embeddings kept in memory or in a feature
/// file ("DGIF"). Both backings read and write whole rows; file-backed stores
/// use positional I/O so concurrent writers to disjoint rows are safe.
class EmbeddingStore {
 public:
  EmbeddingStore();
  EmbeddingStore(EmbeddingStore&&) noexcept;
  EmbeddingStore& operator=(EmbeddingStore&&) noexcept;
  ~EmbeddingStore();

  /// Creates a zero-initialized store. File backing writes a complete feature
  /// file at `path` (created or truncated).
  static EmbeddingStore create(std::uint64_t rows, std::uint64_t dim, Backing backing,
                               const std::optional<std::filesystem::path>& path = std::nullopt,
                               const StoreOptions& options = {});

  /// Opens an existing feature file. Memory backing loads it; file backing
  /// keeps it open for positional access.
  static EmbeddingStore open(const std::filesystem::path& path, Backing backing);

  /// In-memory store holding a copy of `m`.
  static EmbeddingStore from_matrix(const DenseMat& m);

  std::uint64_t rows() const { return rows_; }
  std::uint64_t dim() const { return dim_; }
  Backing backing() const;

  void read_row(NodeId v, std::span<float> out) const;
  void write_row(NodeId v, std::span<const float> values);

  /// Row k of the result is row ids[k]; duplicates are allowed.
  DenseMat gather_rows(std::span<const NodeId> ids) const;
  DenseMat to_matrix() const;

  /// Writes the contents as a feature file.
  void save(const std::filesystem::path& path) const;

 private:
  EmbeddingStore(std::uint64_t rows, std::uint64_t dim, std::unique_ptr<RowBackend> backend);
  void check_row(NodeId v, std::size_t width) const;

  std::uint64_t rows_ = 0;
  std::uint64_t dim_ = 0;
  std::unique_ptr<RowBackend> backend_;
};

std::vector<std::uint8_t> encode_features(const DenseMat& m);
DenseMat decode_features(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

}  // namespace lwgnn
