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

#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "lwgnn/batching.hpp"
#include "lwgnn/error.hpp"
#include "lwgnn/generators.hpp"
#include "lwgnn/random.hpp"

using namespace lwgnn;
using namespace lwgnn::testing;

namespace {

std::vector<NodeId> iota_ids(std::size_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

// Linear scan: keep adding targets while both limits hold.
BatchRange scan_batch(const std::vector<std::uint64_t>& degrees, std::size_t pos, const Thresholds& t) {
  std::size_t j = pos;
  std::uint64_t edges = 0;
  while (j < degrees.size() && j - pos < t.max_nodes && edges + degrees[j] <= t.max_edges) edges += degrees[j++];
  if (j == pos) j = pos + 1;
  return {pos, j};
}

// Footprint proportional to batch size and edges.
BatchFootprint linear_cost(const BatchCursor& c, BatchRange r, std::uint64_t per_node, std::uint64_t per_edge) {
  BatchFootprint fp;
  fp.input_bytes = r.size() * per_node;
  fp.graph_slice_bytes = c.prefix().range_sum(r.begin, r.end) * per_edge;
  return fp;
}

}  // namespace

TEST_SUITE("batching") {
  TEST_CASE("next_batch examples") {
    const CscGraph t = gen::toy();
    BatchCursor c(t, iota_ids(6));
    CHECK(next_batch(c, {2, 3}) == BatchRange{0, 1});
    CHECK(next_batch(c, {10, 100}) == BatchRange{0, 6});
    CHECK(next_batch(c, {2, 4}) == BatchRange{0, 2});
    c.advance_to(3);
    CHECK(next_batch(c, {10, 0}) == BatchRange{3, 6});
    c.advance_to(6);
    CHECK_FALSE(next_batch(c, {10, 100}).has_value());

    BatchCursor heavy(std::vector<NodeId>{0, 1}, DegreePrefix{{0, 5, 6}});
    CHECK(next_batch(heavy, {4, 3}) == BatchRange{0, 1});
  }

  TEST_CASE("next_batch agrees with a linear scan") {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng.below(40);
      std::vector<std::uint64_t> degrees(n);
      DegreePrefix p{{0}};
      for (auto& d : degrees) {
        d = rng.below(4) == 0 ? 0 : rng.below(12);
        p.prefix.push_back(p.prefix.back() + d);
      }
      BatchCursor c(iota_ids(n), p);
      c.advance_to(rng.below(n));
      const Thresholds t{1 + rng.below(10), rng.below(40)};
      CHECK(*next_batch(c, t) == scan_batch(degrees, c.position(), t));
    }
  }

  TEST_CASE("adapt and on_oom examples") {
    CHECK(adapt({1000, 32000}, 90, 45) == Thresholds{2000, 64000});
    CHECK(adapt({1000, 32000}, 90, 90) == Thresholds{1000, 32000});
    CHECK(adapt({1000, 32000}, 90, 9) == Thresholds{4000, 128000});
    CHECK(adapt({1000, 32000}, 90, 900) == Thresholds{500, 16000});
    CHECK(adapt({1, 3}, 10, 40) == Thresholds{1, 2});
    CHECK_THROWS_AS(adapt({1, 1}, 10, 0), Error);
    CHECK(on_oom({1000, 32000}) == Thresholds{500, 16000});
    CHECK(on_oom({1, 10}) == Thresholds{1, 5});
    CHECK(on_oom({1, 0}) == Thresholds{1, 0});
  }

  TEST_CASE("unrecoverable singleton") {
    BatchCursor c(std::vector<NodeId>{7}, DegreePrefix{{0, 3}});
    Thresholds t{1, 0};
    const auto budget = DeviceBudget::with_capacity(100);
    const MeasureBatch measure = [](BatchRange) { return BatchFootprint{.input_bytes = 200}; };
    const ExecuteBatch execute = [](BatchRange, const BatchFootprint&) {};
    try {
      run_layer_batched(c, t, budget, measure, execute);
      FAIL("expected OOM");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kOom);
      CHECK(std::string(e.what()).find("node 7") != std::string::npos);
      CHECK(std::string(e.what()).find("200") != std::string::npos);
    }
  }

  TEST_CASE("batches partition the targets across OOM retries") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.below(300);
      DegreePrefix p{{0}};
      for (std::size_t i = 0; i < n; ++i) p.prefix.push_back(p.prefix.back() + rng.below(9));
      BatchCursor c(iota_ids(n), p);
      Thresholds t{1 + rng.below(200), rng.below(2000)};
      const auto budget = DeviceBudget::with_capacity(2000 + rng.below(4000));
      std::vector<BatchRange> executed;
      const MeasureBatch measure = [&](BatchRange r) { return linear_cost(c, r, 16, 8); };
      const ExecuteBatch execute = [&](BatchRange r, const BatchFootprint& fp) {
        CHECK(fp.peak() <= budget.capacity);
        executed.push_back(r);
      };
      const auto log = run_layer_batched(c, t, budget, measure, execute);
      REQUIRE(log.size() == executed.size());
      std::size_t expect = 0;
      for (const auto& r : executed) {
        CHECK(r.begin == expect);
        CHECK(r.size() >= 1);
        expect = r.end;
      }
      CHECK(expect == n);
      CHECK(log.back().last_in_block);
      CHECK(c.exhausted());
    }
  }

  TEST_CASE("thresholds grow until the footprint tracks the setpoint") {
    const CscGraph g = gen::regular(20000, 4, 1);
    BatchCursor c(g, iota_ids(20000));
    Thresholds t{4, 16};
    const auto budget = DeviceBudget::with_capacity(400000);
    const MeasureBatch measure = [&](BatchRange r) { return linear_cost(c, r, 40, 8); };
    const ExecuteBatch execute = [](BatchRange, const BatchFootprint&) {};
    const auto log = run_layer_batched(c, t, budget, measure, execute);
    REQUIRE(log.size() > 8);
    for (std::size_t k = 1; k < 4; ++k) CHECK(log[k].thresholds.max_nodes == 4 * log[k - 1].thresholds.max_nodes);
    for (std::size_t k = 8; k < log.size(); ++k) {
      if (log[k].last_in_block) continue;
      CHECK(log[k].footprint.peak() >= budget.target * 7 / 10);
      CHECK(log[k].footprint.peak() <= budget.capacity);
    }
  }

  TEST_CASE("capacity below the initial footprint recovers by halving") {
    const CscGraph g = gen::regular(1000, 4, 2);
    BatchCursor c(g, iota_ids(1000));
    Thresholds t{1024, 32768};
    const auto budget = DeviceBudget::with_capacity(5000);
    const MeasureBatch measure = [&](BatchRange r) { return linear_cost(c, r, 40, 8); };
    std::size_t covered = 0;
    const ExecuteBatch execute = [&](BatchRange r, const BatchFootprint&) { covered += r.size(); };
    const auto log = run_layer_batched(c, t, budget, measure, execute);
    CHECK(log.front().oom_retries > 0);
    CHECK(log.front().footprint.peak() <= budget.capacity);
    CHECK(covered == 1000);
  }

  TEST_CASE("one slack batch") {
    const CscGraph t = gen::toy();
    BatchCursor c(t, iota_ids(6));
    Thresholds th{1024, 32768};
    const auto budget = DeviceBudget::with_capacity(1 << 20);
    int adapts = 0;
    const MeasureBatch measure = [&](BatchRange r) { return linear_cost(c, r, 4, 8); };
    const ExecuteBatch execute = [&](BatchRange, const BatchFootprint&) { ++adapts; };
    const auto log = run_layer_batched(c, th, budget, measure, execute);
    CHECK(log.size() == 1);
    CHECK(adapts == 1);
    CHECK(th.max_nodes == 4096);
  }

  TEST_CASE("static thresholds stay put") {
    const CscGraph t = gen::toy();
    BatchCursor c(t, iota_ids(6));
    Thresholds th{2, 1000};
    const MeasureBatch measure = [&](BatchRange r) { return linear_cost(c, r, 4, 8); };
    const auto log = run_layer_batched(c, th, DeviceBudget::with_capacity(1 << 20), measure,
                                       [](BatchRange, const BatchFootprint&) {}, false);
    CHECK(log.size() == 3);
    CHECK(th == Thresholds{2, 1000});
  }
}
