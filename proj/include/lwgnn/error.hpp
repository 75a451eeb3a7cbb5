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

#include <stdexcept>
#include <string>

namespace lwgnn {

enum class ErrorKind {
  kConfig,     // conflicting or missing run configuration
  kFormat,     // malformed file or document
  kIo,         // file could not be opened, read or written
  kBounds,     // node id or row out of range
  kShape,      // dimension mismatch between tensors
  kCapacity,   // external store larger than its configured capacity
  kOom,        // a single node does not fit on the device
  kInvariant,  // internal consistency check failed
};

const char* to_string(ErrorKind kind);

/// All library failures are reported through this exception; `kind()` selects
/// the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lwgnn
