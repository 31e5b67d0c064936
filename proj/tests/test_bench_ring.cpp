// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Ring interconnect workload: seeded all-to-all traffic over store-and-forward
// nodes, checked against the bench's own oracle and against expectations
// recomputed independently here.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "weft/bench.hpp"
#include "weft/errors.hpp"
#include "weft/scheduler.hpp"

using namespace weft;

namespace {

SchedulerConfig coro(int workers = 1, std::uint64_t seed = 0) {
  SchedulerConfig c;
  c.mode = SchedulerConfig::Mode::Coroutine;
  c.workers = workers;
  c.seed = seed;
  return c;
}

// Mirror of the workload definition: the destination schedule of one
// endpoint and the payload packing, recomputed without touching bench code.
std::vector<int> destinations(std::uint64_t seed, int id, int n, int count) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + std::uint64_t(id) + 1);
  std::vector<int> dst(count);
  for (int k = 0; k < count; ++k)
    dst[k] = (id + 1 + static_cast<int>(rng() % std::uint64_t(n - 1))) % n;
  return dst;
}

std::uint64_t payload_of(int src, int k, int dst) {
  return (std::uint64_t(src) << 12) | (std::uint64_t(k) << 4) |
         std::uint64_t(dst);
}

}  // namespace

TEST_CASE("default ring completes and satisfies its oracle") {
  auto bench = make_bench("ring", {});
  auto [report, result] = bench->run_and_verify(coro());
  CHECK(report.outcome == Outcome::Completed);
  CHECK_MESSAGE(result.ok, result.detail);
  CHECK(channel_hygiene_issue(report).empty());
  for (const auto& ch : report.channels) {
    CHECK(ch.stats.eot_written == 1);
    CHECK(ch.stats.eot_read == 1);
  }
}

TEST_CASE("delivered payloads match an independent recomputation") {
  const int n = 4, packets = 6;
  const std::uint64_t seed = 17;
  auto bench = make_bench("ring", {.size = n, .seed = seed, .packets = packets});
  auto [report, result] = bench->run_and_verify(coro());
  REQUIRE(report.outcome == Outcome::Completed);
  REQUIRE_MESSAGE(result.ok, result.detail);

  std::vector<std::vector<std::uint64_t>> want(n);
  for (int src = 0; src < n; ++src) {
    const std::vector<int> dst = destinations(seed, src, n, packets);
    for (int k = 0; k < packets; ++k)
      want[dst[k]].push_back(payload_of(src, k, dst[k]));
  }
  for (int i = 0; i < n; ++i) {
    auto got = bench->collector()->take("ring/PE." + std::to_string(i));
    std::sort(got.begin(), got.end());
    std::sort(want[i].begin(), want[i].end());
    CHECK(got == want[i]);
  }
}

TEST_CASE("randomized sizes and seeds all complete and verify") {
  std::mt19937_64 rng(2026);
  for (int round = 0; round < 24; ++round) {
    BenchParams p;
    p.size = 2 + static_cast<int>(rng() % 7);      // 2..8 nodes
    p.packets = static_cast<int>(rng() % 12);      // 0..11 per endpoint
    p.seed = rng();
    CAPTURE(round);
    CAPTURE(p.size);
    CAPTURE(p.packets);
    CAPTURE(p.seed);
    auto bench = make_bench("ring", p);
    auto [report, result] = bench->run_and_verify(coro());
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
  }
}

TEST_CASE("fixed-offset traffic: every endpoint targets id+offset") {
  for (int offset : {1, 2, 3}) {
    CAPTURE(offset);
    auto bench = make_bench("ring", {.size = 4, .packets = 5, .offset = offset});
    auto [report, result] = bench->run_and_verify(coro());
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
    // Destination i receives exactly the packets of endpoint i-offset.
    for (int i = 0; i < 4; ++i) {
      const int src = ((i - offset) % 4 + 4) % 4;
      auto got = bench->collector()->take("ring/PE." + std::to_string(i));
      REQUIRE(got.size() == 5);
      std::sort(got.begin(), got.end());
      for (int k = 0; k < 5; ++k) CHECK(got[std::size_t(k)] == payload_of(src, k, i));
    }
  }
}

TEST_CASE("zero packets still opens and closes every stream cleanly") {
  auto bench = make_bench("ring", {.size = 5, .packets = 0});
  auto [report, result] = bench->run_and_verify(coro());
  CHECK(report.outcome == Outcome::Completed);
  CHECK_MESSAGE(result.ok, result.detail);
  for (const auto& ch : report.channels) {
    CHECK(ch.stats.eot_written == 1);
    CHECK(ch.final_occupancy == 0);
  }
}

TEST_CASE("multiple workers deliver the same traffic") {
  for (int workers : {2, 4}) {
    CAPTURE(workers);
    auto bench = make_bench("ring", {.size = 6, .seed = 3, .packets = 10});
    auto [report, result] = bench->run_and_verify(coro(workers));
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
    CHECK(report.workers == workers);
  }
}

TEST_CASE("multi-worker trace is a legal per-channel interleaving") {
  auto bench = make_bench("ring", {.size = 4, .seed = 9, .packets = 8});
  SchedulerConfig cfg = coro(2, 5);
  cfg.trace = true;
  auto [report, result] = bench->run_and_verify(cfg);
  REQUIRE(report.outcome == Outcome::Completed);
  REQUIRE_MESSAGE(result.ok, result.detail);
  CHECK(report.trace.size() > 0);
  const std::string issue = testutil::replay_issue(report.trace, report);
  CHECK_MESSAGE(issue.empty(), issue);
}

TEST_CASE("out-of-range shapes are rejected upfront") {
  CHECK_THROWS_AS((void)make_bench("ring", {.size = 1}), BadSizeError);
  CHECK_THROWS_AS((void)make_bench("ring", {.size = 1000}), BadSizeError);
  BenchParams negative;
  negative.offset = -1;
  CHECK_THROWS_AS((void)make_bench("ring", negative), BadSizeError);
  BenchParams flood;
  flood.packets = 1 << 20;
  CHECK_THROWS_AS((void)make_bench("ring", flood), BadSizeError);
}
