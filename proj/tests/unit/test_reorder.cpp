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

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/generators.hpp"
#include "lwgnn/random.hpp"
#include "lwgnn/reorder.hpp"

using namespace lwgnn;
using namespace lwgnn::testing;

namespace {

CscGraph symmetric(std::uint64_t n, const std::vector<std::pair<NodeId, NodeId>>& undirected) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (auto [u, v] : undirected) {
    edges.emplace_back(u, v);
    edges.emplace_back(v, u);
  }
  return graph_from_edges(n, edges);
}

bool is_permutation_of_iota(const std::vector<NodeId>& p) {
  std::vector<NodeId> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) return false;
  return true;
}

}  // namespace

TEST_SUITE("reorder") {
  TEST_CASE("node order validation") {
    const NodeOrder o({2, 0, 1});
    CHECK(o.inv() == std::vector<NodeId>{1, 2, 0});
    CHECK(o.inverse().perm() == o.inv());
    CHECK_FALSE(o.is_identity());
    CHECK(NodeOrder::identity(4).is_identity());
    CHECK_THROWS_AS(NodeOrder({0, 0, 1}), Error);
    CHECK_THROWS_AS(NodeOrder({0, 3}), Error);
    CHECK(parse_order_kind("rcmk") == OrderKind::kRcmk);
    CHECK(to_string(OrderKind::kDegree) == "degree");
    CHECK_THROWS_AS(parse_order_kind("metis"), Error);
  }

  TEST_CASE("rcmk on a scrambled path") {
    const CscGraph g = symmetric(4, {{0, 2}, {2, 1}, {1, 3}});
    CHECK(bandwidth(g) == 2);
    const NodeOrder o = rcmk(g);
    CHECK(o.perm() == std::vector<NodeId>{3, 1, 2, 0});
    CHECK(bandwidth(relabel(g, o)) == 1);
  }

  TEST_CASE("rcmk without edges reverses ids") {
    const CscGraph g = graph_from_edges(5, std::vector<std::pair<NodeId, NodeId>>{});
    CHECK(rcmk(g).perm() == std::vector<NodeId>{4, 3, 2, 1, 0});
  }

  TEST_CASE("rcmk keeps a banded path banded") {
    const CscGraph g = symmetric(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(bandwidth(relabel(g, rcmk(g))) == 1);
    CHECK(bandwidth(relabel(gen::path(5), rcmk(gen::path(5)))) == 1);
  }

  TEST_CASE("degree sort") {
    CHECK(degree_sort(gen::toy()).perm() == std::vector<NodeId>{3, 4, 5, 0, 1, 2});
    CHECK(degree_sort(gen::regular(50, 3, 1)).is_identity());
    CHECK(degree_sort(graph_from_edges(1, std::vector<std::pair<NodeId, NodeId>>{})).is_identity());
  }

  TEST_CASE("random order") {
    const CscGraph g = gen::regular(100, 2, 3);
    const NodeOrder a = random_order(g, 5);
    CHECK(a.perm() == random_order(g, 5).perm());
    CHECK(is_permutation_of_iota(a.perm()));
    NodeOrder b = random_order(g, 6);
    if (b.perm() == a.perm()) b = random_order(g, 7);
    CHECK(b.perm() != a.perm());
  }

  TEST_CASE("every producer yields a bijection") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CscGraph g = random_graph(60, 6, seed);
      for (auto kind : {OrderKind::kNone, OrderKind::kRcmk, OrderKind::kDegree, OrderKind::kRandom}) {
        const NodeOrder o = make_order(g, kind, seed);
        REQUIRE(o.size() == 60);
        CHECK(is_permutation_of_iota(o.perm()));
        for (NodeId v = 0; v < 60; ++v) CHECK(o.new_id(o.old_id(v)) == v);
      }
    }
  }

  TEST_CASE("apply_order identity and inverse round trip") {
    const CscGraph g = random_graph(30, 5, 9);
    const EmbeddingStore x = random_features(30, 3, 9);
    const auto [g0, x0] = apply_order(g, x, NodeOrder::identity(30));
    CHECK(g0 == g);
    CHECK(same_bytes(x0.to_matrix(), x.to_matrix()));

    const NodeOrder o = random_order(g, 4);
    const auto [g1, x1] = apply_order(g, x, o);
    for (NodeId v = 0; v < 30; ++v) {
      CHECK(g1.in_degree(o.new_id(v)) == g.in_degree(v));
      CHECK(same_bytes(x1.gather_rows(std::vector<NodeId>{o.new_id(v)}), x.gather_rows(std::vector<NodeId>{v})));
    }
    const auto [g2, x2] = apply_order(g1, x1, o.inverse());
    CHECK(g2 == g);
    CHECK(same_bytes(x2.to_matrix(), x.to_matrix()));
    CHECK_THROWS_AS(apply_order(g, random_features(29, 3, 9), o), Error);
  }

  TEST_CASE("permutation file round trip") {
    const auto dir = scratch_dir("reorder_perm");
    const NodeOrder o = rcmk(gen::powerlaw(200, 2, 1));
    write_permutation(o, dir / "p.dgip");
    CHECK(load_permutation(dir / "p.dgip").perm() == o.perm());
  }

  TEST_CASE("rcmk does not widen scrambled banded graphs") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const std::uint64_t n = 20 + rng.below(200);
      const std::uint64_t band = 1 + rng.below(5);
      std::vector<std::pair<NodeId, NodeId>> und;
      for (NodeId u = 0; u < n; ++u)
        for (NodeId k = 1; k <= band && u + k < n; ++k)
          if (rng.below(3) != 0) und.emplace_back(u, u + k);
      const CscGraph banded = symmetric(n, und);
      const CscGraph scrambled = relabel(banded, random_order(banded, rng.below(1000)));
      CHECK(bandwidth(relabel(scrambled, rcmk(scrambled))) <= bandwidth(scrambled));
    }
  }
}
