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

#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "lwgnn/cli.hpp"
#include "lwgnn/embedding_store.hpp"

using namespace lwgnn;
using namespace lwgnn::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lwgnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path toy_fixture(const std::string& name) {
  const fs::path dir = scratch_dir(name);
  REQUIRE(cli({"gen", "--kind", "toy", "--feature-dim", "3", "--model", "gcn", "--hidden", "4", "--out-dim", "2",
               "--seed", "5", "--out-dir", dir.string()})
              .code == 0);
  return dir;
}

std::vector<std::string> infer_args(const fs::path& d) {
  return {"infer", "--graph", (d / "graph.dgig").string(), "--features", (d / "features.dgif").string(), "--model",
          (d / "model.json").string(), "--params", (d / "params.dgiw").string()};
}

std::vector<std::string> plus(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("byte sizes") {
    CHECK(parse_byte_size("64") == 64);
    CHECK(parse_byte_size("2KiB") == 2048);
    CHECK(parse_byte_size("1.5MiB") == 1572864);
    CHECK(parse_byte_size("1GiB") == std::uint64_t{1} << 30);
    CHECK_THROWS_AS(parse_byte_size("12 parsecs"), Error);
    CHECK_THROWS_AS(parse_byte_size(""), Error);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorKind::kConfig) == kExitConfig);
    CHECK(exit_code_for(ErrorKind::kFormat) == kExitFormat);
    CHECK(exit_code_for(ErrorKind::kOom) == kExitOom);
    CHECK(exit_code_for(ErrorKind::kInvariant) == kExitInvariant);
    CHECK(exit_code_for(ErrorKind::kIo) == kExitIo);
    CHECK(cli({"frobnicate"}).code == kExitConfig);
    CHECK(cli({"infer", "--graph", "/nonexistent/g.dgig", "--features", "f", "--model", "m", "--params", "p"}).code ==
          kExitIo);
  }

  TEST_CASE("layer-wise and node-wise files are identical") {
    const fs::path d = toy_fixture("cli_equiv");
    const auto lw = cli(plus(infer_args(d), {"--output", (d / "lw.dgif").string()}));
    REQUIRE(lw.code == 0);
    const auto nw = cli(plus(infer_args(d), {"--executor", "nodewise", "--batch-size", "1", "--order", "rcmk",
                                             "--output", (d / "nw.dgif").string()}));
    REQUIRE(nw.code == 0);
    CHECK(io::read_file(d / "lw.dgif") == io::read_file(d / "nw.dgif"));
  }

  TEST_CASE("partial output follows the listed targets") {
    const fs::path d = toy_fixture("cli_partial");
    REQUIRE(cli(plus(infer_args(d), {"--output", (d / "full.dgif").string()})).code == 0);
    std::ofstream(d / "targets.txt") << "4\n0\n4\n";
    REQUIRE(cli(plus(infer_args(d), {"--mode", "partial", "--targets", (d / "targets.txt").string(), "--output",
                                     (d / "part.dgif").string()}))
                .code == 0);
    const DenseMat full = EmbeddingStore::open(d / "full.dgif", Backing::kMemory).to_matrix();
    const DenseMat part = EmbeddingStore::open(d / "part.dgif", Backing::kMemory).to_matrix();
    REQUIRE(part.rows() == 3);
    const auto idx = std::vector<NodeId>{4, 0, 4};
    CHECK(same_bytes(part, EmbeddingStore::from_matrix(full).gather_rows(idx)));
  }

  TEST_CASE("config conflicts") {
    const fs::path d = toy_fixture("cli_config");
    CHECK(cli(plus(infer_args(d), {"--mode", "partial"})).code == kExitConfig);
    std::ofstream(d / "targets.txt") << "1\n";
    CHECK(cli(plus(infer_args(d), {"--targets", (d / "targets.txt").string()})).code == kExitConfig);
    CHECK(cli(plus(infer_args(d), {"--mode", "sampling", "--fanout", "0"})).code == kExitConfig);
    CHECK(cli(plus(infer_args(d), {"--device-mem", "16B", "--executor", "nodewise"})).code == kExitOom);
  }

  TEST_CASE("validate") {
    const fs::path d = toy_fixture("cli_validate");
    const auto base = std::vector<std::string>{"validate", "--graph", (d / "graph.dgig").string(), "--features",
                                               (d / "features.dgif").string(), "--model", (d / "model.json").string(),
                                               "--params", (d / "params.dgiw").string()};
    const auto good = cli(base);
    CHECK(good.code == 0);
    CHECK(good.out.find("FAIL") == std::string::npos);

    auto bytes = io::read_file(d / "graph.dgig");
    bytes.resize(bytes.size() - 9);
    io::write_file(d / "short.dgig", bytes);
    const auto truncated = cli({"validate", "--graph", (d / "short.dgig").string()});
    CHECK(truncated.code == kExitCheckFailed);
    CHECK(truncated.out.find("FAIL graph") != std::string::npos);
    CHECK(truncated.out.find("offset") != std::string::npos);

    std::ofstream(d / "cycle.json") << R"({"version": 1, "input_dim": 1, "operators": [
      {"id": "x", "kind": "Input"},
      {"id": "a", "kind": "ReLU", "inputs": ["b"]},
      {"id": "b", "kind": "ReLU", "inputs": ["a"]},
      {"id": "out", "kind": "Output", "inputs": ["b"]}], "output": "out"})";
    const auto cycle = cli({"validate", "--model", (d / "cycle.json").string()});
    CHECK(cycle.code == kExitCheckFailed);
    CHECK(cycle.out.find("FAIL model") != std::string::npos);
    CHECK(cycle.out.find("a -> b -> a") != std::string::npos);
  }

  TEST_CASE("seeded runs are byte-reproducible") {
    const fs::path a = scratch_dir("cli_repro_a");
    const fs::path b = scratch_dir("cli_repro_b");
    for (const auto& dir : {a, b}) {
      REQUIRE(cli({"gen", "--kind", "powerlaw", "--nodes", "300", "--m", "2", "--model", "gat", "--seed", "9",
                   "--out-dir", dir.string()})
                  .code == 0);
      REQUIRE(cli(plus(infer_args(dir), {"--mode", "sampling", "--fanout", "3", "--seed", "4", "--order", "random",
                                         "--device-mem", "64KiB", "--output", (dir / "out.dgif").string(), "--stats",
                                         (dir / "stats.json").string()}))
                  .code == 0);
    }
    for (const char* f : {"graph.dgig", "features.dgif", "model.json", "params.dgiw", "out.dgif", "stats.json"}) {
      CAPTURE(f);
      CHECK(io::read_file(a / f) == io::read_file(b / f));
    }
  }

  TEST_CASE("reorder and split commands") {
    const fs::path d = toy_fixture("cli_reorder");
    const auto r = cli({"reorder", "--graph", (d / "graph.dgig").string(), "--features", (d / "features.dgif").string(),
                        "--order", "degree", "--out-dir", (d / "re").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "re" / "perm.dgip"));
    const auto v = cli({"validate", "--graph", (d / "re" / "graph.dgig").string(), "--perm",
                        (d / "re" / "perm.dgip").string()});
    CHECK(v.code == 0);
    const auto s = cli({"split", "--model", (d / "model.json").string(), "--params", (d / "params.dgiw").string()});
    CHECK(s.code == 0);
    CHECK(s.out.find("block 2") != std::string::npos);
  }
}
