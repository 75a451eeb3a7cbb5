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

#include <cstddef>
#include <span>
#include <vector>

namespace lwgnn {

/// Non-owning row-major view; used for parameter matrices.
struct MatView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const float> values;

  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const float> row(std::size_t r) const { return values.subspan(r * cols, cols); }
};

/// Row-major float32 matrix holding one embedding per row.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}
  DenseMat(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<float> row(std::size_t r) { return std::span<float>(values_).subspan(r * cols_, cols_); }
  std::span<const float> row(std::size_t r) const { return std::span<const float>(values_).subspan(r * cols_, cols_); }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  MatView view() const { return {rows_, cols_, values_}; }

  friend bool operator==(const DenseMat&, const DenseMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

}  // namespace lwgnn
