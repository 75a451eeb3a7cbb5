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

#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "lwgnn/embedding_store.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/generators.hpp"
#include "lwgnn/graph.hpp"
#include "binary_io.hpp"
#include "lwgnn/random.hpp"

using namespace lwgnn;
using namespace lwgnn::testing;

namespace {

template <typename Fn>
ErrorKind error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lwgnn::Error");
  return ErrorKind::kInvariant;
}

std::string error_text_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::vector<NodeId> to_vec(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("storage") {
  TEST_CASE("toy graph layout") {
    const CscGraph t = gen::toy();
    CHECK(t.num_nodes() == 6);
    CHECK(t.num_edges() == 6);
    CHECK(std::vector<std::uint64_t>(t.indptr().begin(), t.indptr().end()) == std::vector<std::uint64_t>{0, 2, 4, 6, 6, 6, 6});
    CHECK(to_vec(t.indices()) == std::vector<NodeId>{2, 3, 2, 3, 4, 5});
    CHECK(to_vec(t.in_neighbors(A)) == std::vector<NodeId>{C, D});
    CHECK(t.in_neighbors(D).empty());
    CHECK(to_vec(t.in_neighbors(C)) == std::vector<NodeId>{E, F});
    CHECK(error_kind_of([&] { (void)t.in_neighbors(6); }) == ErrorKind::kBounds);
  }

  TEST_CASE("edge list keeps per-destination order") {
    const std::vector<std::pair<NodeId, NodeId>> edges{{3, 0}, {2, 1}, {2, 0}, {3, 1}, {5, 2}, {4, 2}};
    const CscGraph g = graph_from_edges(6, edges);
    CHECK(to_vec(g.in_neighbors(0)) == std::vector<NodeId>{3, 2});
    CHECK(to_vec(g.in_neighbors(2)) == std::vector<NodeId>{5, 4});
  }

  TEST_CASE("empty and self-loop graphs") {
    const CscGraph empty;
    CHECK(empty.num_nodes() == 0);
    CHECK(decode_graph(encode_graph(empty)) == empty);
    const CscGraph loop({0, 1}, {0});
    CHECK(to_vec(loop.in_neighbors(0)) == std::vector<NodeId>{0});
  }

  TEST_CASE("constructor rejects broken invariants") {
    CHECK(error_kind_of([] { CscGraph({1, 1}, {0}); }) == ErrorKind::kFormat);
    CHECK(error_kind_of([] { CscGraph({0, 2, 1}, {0, 0}); }) == ErrorKind::kFormat);
    CHECK(error_kind_of([] { CscGraph({0, 1}, {1}); }) == ErrorKind::kFormat);
    CHECK(error_kind_of([] { CscGraph({0, 1}, {}); }) == ErrorKind::kFormat);
  }

  TEST_CASE("graph file round trip is byte identical") {
    const auto dir = scratch_dir("storage_graph");
    for (const CscGraph& g : {gen::toy(), random_graph(200, 7, 3), CscGraph()}) {
      write_graph(g, dir / "g.dgig");
      const CscGraph back = load_graph(dir / "g.dgig");
      CHECK(back == g);
      write_graph(back, dir / "g2.dgig");
      CHECK(io::read_file(dir / "g.dgig") == io::read_file(dir / "g2.dgig"));
    }
    const auto bytes = encode_graph(gen::toy());
    CHECK(bytes.size() == 24 + 7 * 8 + 6 * 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "DGIG");
  }

  TEST_CASE("malformed graph files name the offset") {
    auto bytes = encode_graph(gen::toy());
    SUBCASE("bad magic") {
      bytes[0] = 'X';
      const auto msg = error_text_of([&] { decode_graph(bytes, "g"); });
      CHECK(msg.find("offset 0") != std::string::npos);
    }
    SUBCASE("truncated indptr") {
      bytes.resize(40);
      const auto msg = error_text_of([&] { decode_graph(bytes, "g"); });
      CHECK(msg.find("indptr") != std::string::npos);
      CHECK(msg.find("offset 24") != std::string::npos);
    }
    SUBCASE("indptr not monotone") {
      bytes[24 + 8 * 2] = 9;  // indptr[2] = 9 > indptr[3] = 6
      const auto msg = error_text_of([&] { decode_graph(bytes, "g"); });
      CHECK(msg.find("monotone") != std::string::npos);
      CHECK(msg.find("offset 48") != std::string::npos);
    }
    SUBCASE("index out of range") {
      bytes[24 + 7 * 8 + 8 * 5] = 6;
      const auto msg = error_text_of([&] { decode_graph(bytes, "g"); });
      CHECK(msg.find("out of range") != std::string::npos);
      CHECK(msg.find("offset 120") != std::string::npos);
    }
    SUBCASE("trailing bytes") {
      bytes.push_back(0);
      CHECK(error_kind_of([&] { decode_graph(bytes, "g"); }) == ErrorKind::kFormat);
    }
  }

  TEST_CASE("degree prefix") {
    const CscGraph t = gen::toy();
    std::vector<NodeId> order(6);
    std::iota(order.begin(), order.end(), NodeId{0});
    CHECK(degree_prefix(t, order).prefix == std::vector<std::uint64_t>{0, 2, 4, 6, 6, 6, 6});
    std::reverse(order.begin(), order.end());
    const auto rev = degree_prefix(t, order);
    CHECK(rev.prefix == std::vector<std::uint64_t>{0, 0, 0, 0, 2, 4, 6});
    CHECK(rev.range_sum(3, 5) == 4);
    CHECK(degree_prefix(CscGraph(), std::vector<NodeId>{}).prefix == std::vector<std::uint64_t>{0});
    CHECK(error_kind_of([&] { degree_prefix(t, std::vector<NodeId>{0, 0}); }) == ErrorKind::kConfig);
    CHECK(error_kind_of([&] { degree_prefix(t, std::vector<NodeId>{6}); }) == ErrorKind::kConfig);
  }

  TEST_CASE("degree prefix total equals edge count") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CscGraph g = random_graph(50, 6, seed);
      std::vector<NodeId> order(50);
      std::iota(order.begin(), order.end(), NodeId{0});
      CHECK(degree_prefix(g, order).prefix.back() == g.num_edges());
    }
  }

  TEST_CASE("memory store basics") {
    auto s = EmbeddingStore::create(6, 4, Backing::kMemory);
    CHECK(s.to_matrix() == DenseMat(6, 4));
    const auto empty = EmbeddingStore::create(0, 8, Backing::kMemory);
    CHECK(empty.rows() == 0);
    CHECK(empty.dim() == 8);
    std::vector<float> row{1, 2, 3, 4};
    s.write_row(2, row);
    std::vector<float> back(4);
    s.read_row(2, back);
    CHECK(back == row);
    CHECK(error_kind_of([&] { s.write_row(6, row); }) == ErrorKind::kBounds);
    CHECK(error_kind_of([&] { s.write_row(0, std::vector<float>{1}); }) == ErrorKind::kShape);
  }

  TEST_CASE("file store round trip and reopen") {
    const auto dir = scratch_dir("storage_file");
    {
      auto s = EmbeddingStore::create(6, 4, Backing::kFile, dir / "f.dgif");
      CHECK(s.backing() == Backing::kFile);
      s.write_row(2, std::vector<float>{1, 2, 3, 4});
    }
    for (const auto backing : {Backing::kFile, Backing::kMemory}) {
      const auto s = EmbeddingStore::open(dir / "f.dgif", backing);
      std::vector<float> back(4);
      s.read_row(2, back);
      CHECK(back == std::vector<float>{1, 2, 3, 4});
      s.read_row(0, back);
      CHECK(back == std::vector<float>{0, 0, 0, 0});
    }
  }

  TEST_CASE("gather rows") {
    DenseMat m(3, 2);
    for (std::size_t v = 0; v < 3; ++v) m.row(v)[0] = m.row(v)[1] = static_cast<float>(v);
    const auto mem = EmbeddingStore::from_matrix(m);
    const std::vector<NodeId> ids{2, 0, 2};
    const DenseMat g = mem.gather_rows(ids);
    CHECK(g == DenseMat(3, 2, {2, 2, 0, 0, 2, 2}));
    CHECK(mem.gather_rows(std::vector<NodeId>{}).rows() == 0);
    CHECK(mem.gather_rows(std::vector<NodeId>{}).cols() == 2);
    const auto dir = scratch_dir("storage_gather");
    mem.save(dir / "m.dgif");
    const auto file = EmbeddingStore::open(dir / "m.dgif", Backing::kFile);
    CHECK(same_bytes(file.gather_rows(ids), g));
    CHECK(error_kind_of([&] { mem.gather_rows(std::vector<NodeId>{3}); }) == ErrorKind::kBounds);
  }

  TEST_CASE("backing equivalence under random row traffic") {
    const auto dir = scratch_dir("storage_equiv");
    auto mem = EmbeddingStore::create(40, 3, Backing::kMemory);
    auto file = EmbeddingStore::create(40, 3, Backing::kFile, dir / "s.dgif");
    Rng rng(5);
    for (int step = 0; step < 500; ++step) {
      const NodeId v = rng.below(40);
      if (rng.below(3) == 0) {
        std::vector<float> a(3), b(3);
        mem.read_row(v, a);
        file.read_row(v, b);
        REQUIRE(a == b);
      } else {
        std::vector<float> row{static_cast<float>(rng.normal()), static_cast<float>(step), -1.5f};
        mem.write_row(v, row);
        file.write_row(v, row);
      }
    }
    CHECK(same_bytes(mem.to_matrix(), file.to_matrix()));
  }

  TEST_CASE("store capacity and path errors") {
    StoreOptions tight{.capacity_bytes = 95};
    CHECK(error_kind_of([&] { EmbeddingStore::create(6, 4, Backing::kMemory, std::nullopt, tight); }) == ErrorKind::kCapacity);
    CHECK_NOTHROW(EmbeddingStore::create(6, 4, Backing::kMemory, std::nullopt, StoreOptions{.capacity_bytes = 96}));
    CHECK(error_kind_of([] { EmbeddingStore::create(2, 2, Backing::kFile); }) == ErrorKind::kConfig);
    CHECK(error_kind_of([] { EmbeddingStore::create(2, 2, Backing::kFile, "/nonexistent/dir/x.dgif"); }) == ErrorKind::kIo);
  }

  TEST_CASE("feature file round trip is byte identical") {
    const auto x = random_features(17, 5, 9).to_matrix();
    const auto bytes = encode_features(x);
    CHECK(bytes.size() == 20 + 17 * 5 * 4);
    const DenseMat back = decode_features(bytes);
    CHECK(same_bytes(back, x));
    CHECK(encode_features(back) == bytes);
    auto cut = bytes;
    cut.resize(cut.size() - 3);
    CHECK(error_text_of([&] { decode_features(cut, "f"); }).find("offset 20") != std::string::npos);
  }
}
