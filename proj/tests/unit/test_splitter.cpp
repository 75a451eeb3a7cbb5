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
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/splitter.hpp"
#include "lwgnn/zoo.hpp"

using namespace lwgnn;
using namespace lwgnn::testing;

namespace {

void check_schedule_invariants(const ModelGraph& m, const BlockSchedule& s) {
  // Partition: every non-Input operator in exactly one block.
  std::vector<int> seen(m.size(), 0);
  for (const auto& b : s.blocks) {
    for (const auto i : b.members) ++seen[i];
  }
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(seen[i] == (i == m.input_index() ? 0 : 1));

  // Layers are exactly 1..L and Convs sit in the block of their layer.
  if (m.depth() > 0) {
    REQUIRE(s.blocks.size() == static_cast<std::size_t>(m.depth()));
    for (std::size_t k = 0; k < s.blocks.size(); ++k) CHECK(s.blocks[k].layer == static_cast<int>(k) + 1);
  }
  for (const auto& b : s.blocks) {
    for (std::size_t k = 0; k < b.members.size(); ++k) {
      const auto i = b.members[k];
      if (is_conv(m.op(i).kind)) CHECK(m.layer_of(i) == b.layer);
    }
  }

  for (const auto& b : s.blocks) {
    std::set<std::size_t> members(b.members.begin(), b.members.end());
    std::set<std::string> input_ids;
    for (const auto& ref : b.inputs) {
      input_ids.insert(ref.tensor);
      CHECK(ref.block < b.id);  // no forward references
      if (ref.block > 0) {
        const auto it = s.drop_after.find(ref.tensor);
        if (it != s.drop_after.end()) CHECK(it->second >= b.id);  // lifetime safety
      }
    }
    // Self-contained: each operand is a member or a declared input.
    for (const auto i : b.members) {
      for (const auto p : m.producers(i)) CHECK((members.contains(p) || input_ids.contains(m.op(p).id)));
    }
    // Domain tags: input-nodes exactly for ancestors of a Conv in the block.
    for (std::size_t k = 0; k < b.members.size(); ++k) {
      const auto i = b.members[k];
      bool feeds_conv = false;
      std::vector<std::size_t> stack(m.consumers(i).begin(), m.consumers(i).end());
      std::set<std::size_t> visited;
      while (!stack.empty() && !feeds_conv) {
        const auto c = stack.back();
        stack.pop_back();
        if (!members.contains(c) || !visited.insert(c).second) continue;
        if (is_conv(m.op(c).kind)) feeds_conv = true;
        stack.insert(stack.end(), m.consumers(c).begin(), m.consumers(c).end());
      }
      CHECK((b.domains[k] == Domain::kInputNodes) == (feeds_conv && !is_conv(m.op(i).kind)));
    }
  }
}

}  // namespace

TEST_SUITE("splitter") {
  TEST_CASE("diamond: both layer-2 Convs share one block and one input") {
    const auto m = make_model("diamond");
    const auto s = split(m);
    CHECK(format_schedule(m, s) ==
          "block 1 layer=1 ops=[conv1:tgt] in=[x@0] out=[conv1@1] drop=[]\n"
          "block 2 layer=2 ops=[conv2:tgt,conv3:tgt,concat:tgt,out:tgt] in=[conv1@1] out=[out@2] drop=[conv1]\n");
    CHECK(s.schema.at(2).size() == 1);
    CHECK(s.drop_after.at("conv1") == 2);
  }

  TEST_CASE("branch: cut directly after the Conv") {
    const auto m = make_model("branch");
    const auto s = split(m);
    CHECK(format_schedule(m, s) ==
          "block 1 layer=1 ops=[conv1:tgt] in=[x@0] out=[conv1@1] drop=[]\n"
          "block 2 layer=2 ops=[relu:in,norm:in,conv2:tgt,conv3:tgt,concat:tgt,out:tgt] in=[conv1@1] out=[out@2] "
          "drop=[conv1]\n");
    CHECK(s.boundary_crossings == std::vector<std::size_t>{1});
  }

  TEST_CASE("chain: the activation joins the upstream block") {
    const auto m = make_model("chain");
    const auto s = split(m);
    CHECK(format_schedule(m, s) ==
          "block 1 layer=1 ops=[conv1:tgt,relu:tgt] in=[x@0] out=[relu@1] drop=[]\n"
          "block 2 layer=2 ops=[conv2:tgt,out:tgt] in=[relu@1] out=[out@2] drop=[relu]\n");
  }

  TEST_CASE("enumerated cuts for the golden fixtures") {
    const auto branch = enumerate_cuts(make_model("branch"), 1);
    CHECK(branch.size() == 4);
    bool after_conv = false, after_both = false;
    for (const auto& c : branch) {
      if (c.upstream.empty()) after_conv = c.crossing == 1 && c.upstream_ops == 0;
      if (c.upstream.size() == 2) after_both = c.crossing == 2 && c.upstream_ops == 2;
    }
    CHECK(after_conv);
    CHECK(after_both);

    const auto chain = enumerate_cuts(make_model("chain"), 1);
    REQUIRE(chain.size() == 2);
    CHECK(chain[0].crossing == 1);
    CHECK(chain[1].crossing == 1);
    CHECK(chain[0].upstream_ops + chain[1].upstream_ops == 1);

    const auto bare = enumerate_cuts(make_model("gcn", {.layers = 3}), 2);
    CHECK(bare.size() == 2);  // relu2 up or down
    ModelBuilder b(2, 0);
    b.conv_mean("c1", b.input(), 0);
    b.conv_mean("c2", "c1", 0);
    b.output("out", "c2");
    CHECK(enumerate_cuts(b.build("out"), 1).size() == 1);
    CHECK_THROWS_AS(enumerate_cuts(make_model("chain"), 2), Error);
  }

  TEST_CASE("jumping knowledge network") {
    const auto m = make_model("jknet", {.layers = 3});
    const auto s = split(m);
    REQUIRE(s.blocks.size() == 4);
    for (int l = 1; l <= 3; ++l) {
      const auto& b = s.blocks[l - 1];
      CHECK(m.op(b.members.front()).kind == OpKind::kConvMean);
    }
    const auto& last = s.blocks[3];
    std::set<std::string> ids;
    for (const auto i : last.members) ids.insert(m.op(i).id);
    CHECK(ids == std::set<std::string>{"jump", "final", "out"});
    for (const auto* t : {"dropout1", "dropout2", "dropout3"}) CHECK(s.drop_after.at(t) == 4);
  }

  TEST_CASE("lifetimes of a linear GCN") {
    const auto m = make_model("gcn", {.layers = 2});
    const auto s = split(m);
    CHECK(s.drop_after.at("relu1") == 2);
    CHECK_FALSE(s.drop_after.contains("out"));
  }

  TEST_CASE("unused tensor is released right after production") {
    ConvBlock first;
    first.id = 1;
    first.outputs = {{"h1", 1}, {"orphan", 1}};
    ConvBlock second;
    second.id = 2;
    second.inputs = {{"h1", 1}};
    second.outputs = {{"out", 2}};
    const ConvBlock blocks[] = {first, second};
    const auto lt = plan_lifetimes(blocks, "out");
    CHECK(lt.drop_after.at("h1") == 2);
    CHECK(lt.drop_after.at("orphan") == 1);
    CHECK_FALSE(lt.drop_after.contains("out"));
    REQUIRE(lt.warnings.size() == 1);
    CHECK(lt.warnings[0].find("orphan") != std::string::npos);
  }

  TEST_CASE("dangling operator is reported") {
    ModelBuilder b(2, 0);
    b.conv_mean("c1", b.input(), 0);
    b.op("spare", OpKind::kReLU, {"c1"});
    b.conv_mean("c2", "c1", 0);
    b.output("out", "c2");
    const auto s = split(b.build("out"));
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("spare") != std::string::npos);
  }

  TEST_CASE("model without Convs is one target-domain block") {
    const auto m = make_model("linear");
    const auto s = split(m);
    REQUIRE(s.blocks.size() == 1);
    CHECK(s.blocks[0].layer == 0);
    for (const auto d : s.blocks[0].domains) CHECK(d == Domain::kTargetNodes);
  }

  TEST_CASE("residual connections") {
    const auto m = make_model("residual");
    const auto s = split(m);
    CHECK(format_schedule(m, s) ==
          "block 1 layer=1 ops=[lin0:in,c1:tgt,r1:tgt,a1:tgt] in=[x@0] out=[a1@1] drop=[]\n"
          "block 2 layer=2 ops=[c2:tgt,a2:tgt,out:tgt] in=[a1@1] out=[out@2] drop=[a1]\n");
  }

  TEST_CASE("schedule invariants on the zoo and random models") {
    for (const auto& name : zoo_names()) {
      const auto m = make_model(name, {.layers = 3});
      check_schedule_invariants(m, split(m));
    }
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
      const auto m = random_model(seed, 20);
      check_schedule_invariants(m, split(m));
    }
  }

  TEST_CASE("split matches the brute-force optimum") {
    for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
      const auto m = random_model(seed, 20);
      const auto s = split(m);
      for (int l = 1; l < m.depth(); ++l) {
        const auto cuts = enumerate_cuts(m, l);
        REQUIRE_FALSE(cuts.empty());
        std::size_t best = SIZE_MAX;
        for (const auto& c : cuts) best = std::min(best, c.crossing);
        std::size_t most_up = 0;
        for (const auto& c : cuts) {
          if (c.crossing == best) most_up = std::max(most_up, c.upstream_ops);
        }
        CHECK(s.boundary_crossings[l - 1] == best);
        // split's own placement of the candidates must be one of the optimal cuts
        const auto& sample = cuts.front();
        std::size_t up = 0;
        for (const auto& id : sample.upstream) up += s.block_of[m.index_of(id)] == l;
        for (const auto& id : sample.downstream) up += s.block_of[m.index_of(id)] == l;
        CHECK(up == most_up);
      }
    }
  }
}
