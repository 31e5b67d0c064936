// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-partition rank iteration over a cross-partition feedback mesh. The
// mesh cycles force suspendable execution; results are checked against a
// dense power iteration, here recomputed independently for the closed-form
// topologies.

#include <bit>
#include <cmath>
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

double as_f64(std::uint64_t bits) { return std::bit_cast<double>(bits); }

// Rank of global vertex v, as reported by the parity-partitioned collector.
double reported_rank(const Bench& bench, int v) {
  const auto got = bench.collector()->take("page_rank/Collect.0:p" +
                                           std::to_string(v % 2));
  REQUIRE(static_cast<int>(got.size()) > v / 2);
  return as_f64(got[std::size_t(v / 2)]);
}

bool close_to(double have, double want, double tol = 1e-9) {
  return std::abs(have - want) <= tol * std::max(1.0, std::abs(want));
}

// Independent mirror of the update rule: damped power iteration from the
// uniform start, run for a fixed iteration budget.
std::vector<double> iterate(const std::vector<std::pair<int, int>>& edges,
                            int n, double d, int iters) {
  std::vector<int> outdeg(n, 0);
  for (const auto& [u, v] : edges) outdeg[std::size_t(u)]++;
  std::vector<double> rank(n, 1.0 / n);
  for (int it = 0; it < iters; ++it) {
    std::vector<double> acc(n, 0.0);
    for (const auto& [u, v] : edges)
      acc[std::size_t(v)] += rank[std::size_t(u)] / outdeg[std::size_t(u)];
    for (int v = 0; v < n; ++v)
      rank[std::size_t(v)] = (1.0 - d) / n + d * acc[std::size_t(v)];
  }
  return rank;
}

}  // namespace

TEST_CASE("directed cycle: every vertex settles at 1/n") {
  for (int n : {4, 5}) {
    CAPTURE(n);
    BenchParams p;
    p.size = n;
    p.variant = 1;
    auto bench = make_bench("page_rank", p);
    auto [report, result] = bench->run_and_verify(coro());
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
    // On a cycle the uniform start is already the fixed point, so the
    // closed-form answer is exact regardless of iteration count.
    for (int v = 0; v < n; ++v)
      CHECK_MESSAGE(close_to(reported_rank(*bench, v), 1.0 / n),
                    "vertex " << v);
  }
}

TEST_CASE("star topology: the hub dominates and sums stay 1") {
  const int n = 5;
  BenchParams p;
  p.size = n;
  p.variant = 2;
  p.iters = 50;
  auto bench = make_bench("page_rank", p);
  auto [report, result] = bench->run_and_verify(coro());
  REQUIRE(report.outcome == Outcome::Completed);
  REQUIRE_MESSAGE(result.ok, result.detail);

  const double hub = reported_rank(*bench, 0);
  double total = hub;
  for (int v = 1; v < n; ++v) {
    const double leaf = reported_rank(*bench, v);
    CHECK(hub > leaf);
    CHECK_MESSAGE(close_to(leaf, reported_rank(*bench, 1)),
                  "leaves must be symmetric, vertex " << v);
    total += leaf;
  }
  CHECK(std::abs(total - 1.0) < 1e-6);  // damping preserves the distribution

  // Independent replay of the same finite iteration, tight tolerance.
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    edges.emplace_back(0, v);
    edges.emplace_back(v, 0);
  }
  const std::vector<double> want = iterate(edges, n, 0.85, 50);
  for (int v = 0; v < n; ++v)
    CHECK_MESSAGE(close_to(reported_rank(*bench, v), want[std::size_t(v)]),
                  "vertex " << v);

  // Closed form of the true fixed point: hub H = (1-d)(1+d*m)/(n(1-d^2))
  // with m leaves, leaf L = (1-d)/n + d*H/m. Fifty rounds land within
  // d^50 ~ 3e-4 of it, so compare coarsely.
  const double d = 0.85;
  const int m = n - 1;
  const double hub_expect = (1.0 - d) * (1.0 + d * m) / (n * (1.0 - d * d));
  const double leaf_expect = (1.0 - d) / n + d * hub_expect / m;
  CHECK_MESSAGE(close_to(hub, hub_expect, 1e-3), hub << " vs " << hub_expect);
  CHECK_MESSAGE(close_to(reported_rank(*bench, 1), leaf_expect, 1e-3),
                reported_rank(*bench, 1) << " vs " << leaf_expect);
}

TEST_CASE("seeded graphs verify across sizes and seeds") {
  std::mt19937_64 rng(31337);
  for (int round = 0; round < 20; ++round) {
    BenchParams p;
    p.size = 4 + static_cast<int>(rng() % 13);  // 4..16 vertices
    p.seed = rng();
    CAPTURE(round);
    CAPTURE(p.size);
    CAPTURE(p.seed);
    auto bench = make_bench("page_rank", p);
    auto [report, result] = bench->run_and_verify(coro());
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
  }
}

TEST_CASE("damping and iteration knobs reach the oracle too") {
  for (double damping : {0.5, 0.95}) {
    for (int iters : {1, 5, 40}) {
      CAPTURE(damping);
      CAPTURE(iters);
      BenchParams p;
      p.size = 6;
      p.seed = 8;
      p.iters = iters;
      p.damping = damping;
      auto bench = make_bench("page_rank", p);
      auto [report, result] = bench->run_and_verify(coro());
      CHECK(report.outcome == Outcome::Completed);
      CHECK_MESSAGE(result.ok, result.detail);
    }
  }
}

TEST_CASE("run-to-completion order fails on the cross-partition loop") {
  BenchParams p;
  p.size = 4;
  p.variant = 1;
  auto bench = make_bench("page_rank", p);
  SchedulerConfig c;
  c.mode = SchedulerConfig::Mode::Sequential;
  auto [report, result] = bench->run_and_verify(c);
  CHECK(report.outcome == Outcome::SequentialFailure);
  CHECK_FALSE(result.ok);
  CHECK(report.failure.find("page_rank/Rank") != std::string::npos);

  auto [report2, result2] = bench->run_and_verify(coro());
  CHECK(report2.outcome == Outcome::Completed);
  CHECK_MESSAGE(result2.ok, result2.detail);
}

TEST_CASE("worker count does not move the ranks") {
  std::vector<double> base;
  for (int workers : {1, 2, 4}) {
    CAPTURE(workers);
    BenchParams p;
    p.size = 9;
    p.seed = 12;
    auto bench = make_bench("page_rank", p);
    auto [report, result] = bench->run_and_verify(coro(workers, 77));
    CHECK(report.outcome == Outcome::Completed);
    CHECK_MESSAGE(result.ok, result.detail);
    std::vector<double> ranks;
    for (int v = 0; v < 9; ++v) ranks.push_back(reported_rank(*bench, v));
    if (workers == 1)
      base = ranks;
    else
      CHECK(ranks == base);  // bit-identical, same reduction order
  }
}

TEST_CASE("shape limits are enforced") {
  CHECK_THROWS_AS((void)make_bench("page_rank", {.size = 1}), BadSizeError);
  CHECK_THROWS_AS((void)make_bench("page_rank", {.size = 65}), BadSizeError);
  BenchParams bad_damping;
  bad_damping.damping = 1.0;
  CHECK_THROWS_AS((void)make_bench("page_rank", bad_damping), BadSizeError);
  BenchParams bad_variant;
  bad_variant.variant = 3;
  CHECK_THROWS_AS((void)make_bench("page_rank", bad_variant), BadSizeError);
}
