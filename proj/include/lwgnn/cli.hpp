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
#include <iosfwd>
#include <string_view>

#include "lwgnn/error.hpp"

namespace lwgnn {

/// Process exit status for each failure category.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitFormat = 3,
  kExitOom = 4,
  kExitInvariant = 5,
  kExitIo = 6,
};

int exit_code_for(ErrorKind kind);

/// "4096", "64KiB", "1.5MiB", "2GiB".
std::uint64_t parse_byte_size(std::string_view text);

/// Entry point of the `lwgnn` tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lwgnn
