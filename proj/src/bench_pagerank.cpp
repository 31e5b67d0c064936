// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Distributed page rank over two vertex partitions connected by a feedback
// mesh. Each Rank task owns the vertices with its parity and, per iteration,
// streams the contributions its vertices owe the other partition (one f64
// per cross edge, in a fixed edge order both sides bake in), applies its
// own-partition contributions locally, then reads exactly the contributions
// the other side owes it. After the final iteration both tasks close the
// mesh and stream their final ranks to a Collect task.
//
// The mesh is a two-channel feedback loop, so the one-shot sequential
// schedule fails on the very first cross read (or, with no cross edges, on
// the final end-of-transaction handshake). Adjacency cannot ride on scalar
// ports at this size, so each partition is its own definition with the edge
// lists baked into the behavior — such graphs export as structure only.
#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>

#include "weft/bench.hpp"
#include "weft/token.hpp"

namespace weft {

namespace {

// Everything one partition's behavior needs, baked at build time.
struct PartitionPlan {
  int n_total = 0;
  int iters = 0;
  double damping = 0.85;
  std::vector<int> verts;                       // global ids, ascending
  std::vector<int> outdeg;                      // per local vertex
  std::vector<std::pair<int, int>> self_edges;  // local (u, v)
  std::vector<int> out_order;   // local u per outgoing cross write
  std::vector<int> in_targets;  // local v per incoming cross read
};

BehaviorFactory make_rank_behavior(std::shared_ptr<const PartitionPlan> plan) {
  return coro_behavior([plan](TaskContext& ctx) -> BehaviorCoro {
    OutStream mesh_out = ctx.out("mesh_out");
    InStream mesh_in = ctx.in("mesh_in");
    OutStream ranks_out = ctx.out("ranks_out");

    const int nv = static_cast<int>(plan->verts.size());
    std::vector<double> rank(nv, 1.0 / plan->n_total);
    for (int it = 0; it < plan->iters; ++it) {
      for (int u : plan->out_order)
        co_await mesh_out.write(
            Token::data(f64_bits(rank[u] / plan->outdeg[u])));
      std::vector<double> acc(nv, 0.0);
      for (const auto& [u, v] : plan->self_edges)
        acc[v] += rank[u] / plan->outdeg[u];
      for (int v : plan->in_targets) {
        Token t = co_await mesh_in.read();
        if (t.is_eot) throw std::runtime_error("mesh ended mid-iteration");
        acc[v] += bits_f64(t.payload);
      }
      for (int v = 0; v < nv; ++v)
        rank[v] = (1.0 - plan->damping) / plan->n_total + plan->damping * acc[v];
    }
    co_await mesh_out.close();
    for (int v = 0; v < nv; ++v)
      co_await ranks_out.write(Token::data(f64_bits(rank[v])));
    co_await ranks_out.close();
    Token end = co_await mesh_in.read();
    if (!end.is_eot)
      throw std::runtime_error("expected end of transaction on mesh_in");
  });
}

BehaviorFactory make_collect_behavior(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    for (int part = 0; part < 2; ++part) {
      const std::string tag = std::to_string(part);
      const int count = static_cast<int>(ctx.scalar("count" + tag));
      InStream in = ctx.in("in" + tag);
      for (int k = 0; k < count; ++k) {
        Token t = co_await in.read();
        if (t.is_eot) throw std::runtime_error("ranks ended early");
        if (col) col->push(ctx.instance_path() + ":p" + tag, t.payload);
      }
      Token end = co_await in.read();
      if (!end.is_eot)
        throw std::runtime_error("expected end of transaction on in" + tag);
    }
  });
}

class PageRankBench final : public Bench {
 public:
  explicit PageRankBench(const BenchParams& params) : Bench("page_rank") {
    n_ = params.size > 0 ? params.size : 16;
    iters_ = params.iters >= 0 ? params.iters : 20;
    damping_ = params.damping;
    seed_ = params.seed;
    variant_ = params.variant;
    if (n_ < 2 || n_ > 64)
      throw BadSizeError("page_rank vertex count must be between 2 and 64");
    if (damping_ < 0.0 || damping_ >= 1.0)
      throw BadSizeError("page_rank damping must be in [0, 1)");
    if (variant_ < 0 || variant_ > 2)
      throw BadSizeError("page_rank variant must be 0 (seeded), 1 (cycle), or "
                         "2 (star)");
    build();
  }

 private:
  std::vector<std::pair<int, int>> make_edges() const {
    std::vector<std::pair<int, int>> edges;
    if (variant_ == 1) {  // directed cycle
      for (int v = 0; v < n_; ++v) edges.emplace_back(v, (v + 1) % n_);
      return edges;
    }
    if (variant_ == 2) {  // star: hub 0 <-> every leaf
      for (int v = 1; v < n_; ++v) {
        edges.emplace_back(0, v);
        edges.emplace_back(v, 0);
      }
      return edges;
    }
    std::mt19937_64 rng(seed_ * 0x9E3779B97F4A7C15ULL + 0x97);
    for (int u = 0; u < n_; ++u) {
      const int want = 1 + static_cast<int>(rng() % 3);
      std::vector<int> targets;
      while (static_cast<int>(targets.size()) < want) {
        const int v = static_cast<int>(rng() % std::uint64_t(n_));
        if (v == u) continue;
        if (std::find(targets.begin(), targets.end(), v) != targets.end()) {
          // Degenerate duplicates can starve tiny graphs; accept what we have
          // as long as the vertex keeps at least one edge.
          if (static_cast<int>(targets.size()) >= 1) break;
          continue;
        }
        targets.push_back(v);
      }
      for (int v : targets) edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  }

  void build() {
    const std::vector<std::pair<int, int>> edges = make_edges();

    std::vector<int> outdeg(n_, 0);
    for (const auto& [u, v] : edges) outdeg[u]++;

    // Vertices split by parity; local index = rank within the partition.
    std::vector<int> local(n_, 0), part_of(n_, 0);
    std::vector<std::vector<int>> verts(2);
    for (int v = 0; v < n_; ++v) {
      part_of[v] = v % 2;
      local[v] = static_cast<int>(verts[v % 2].size());
      verts[v % 2].push_back(v);
    }

    auto plans = std::array{std::make_shared<PartitionPlan>(),
                            std::make_shared<PartitionPlan>()};
    for (int i = 0; i < 2; ++i) {
      plans[i]->n_total = n_;
      plans[i]->iters = iters_;
      plans[i]->damping = damping_;
      plans[i]->verts = verts[i];
      for (int v : verts[i]) plans[i]->outdeg.push_back(outdeg[v]);
    }
    // Edges are globally (u, v)-sorted, and both endpoints walk each cross
    // list in that order, so values need no vertex tags on the wire.
    for (const auto& [u, v] : edges) {
      const int pu = part_of[u], pv = part_of[v];
      if (pu == pv) {
        plans[pu]->self_edges.emplace_back(local[u], local[v]);
      } else {
        plans[pu]->out_order.push_back(local[u]);
        plans[pv]->in_targets.push_back(local[v]);
      }
    }

    expected_ = power_iteration(edges, outdeg);

    graph_.add_token_type({"contrib", 64});
    for (int i = 0; i < 2; ++i) {
      TaskDefinition rank;
      rank.name = "Rank" + std::to_string(i);
      rank.kind = TaskKind::Leaf;
      rank.ports = {{"mesh_in", PortDirection::InputStream, "contrib"},
                    {"mesh_out", PortDirection::OutputStream, "contrib"},
                    {"ranks_out", PortDirection::OutputStream, "contrib"}};
      rank.behavior = make_rank_behavior(plans[i]);
      graph_.add_definition(std::move(rank));
      counts_[i] = static_cast<int>(verts[i].size());
      cross_out_[i] = static_cast<int>(plans[i]->out_order.size());
    }

    TaskDefinition collect;
    collect.name = "Collect";
    collect.kind = TaskKind::Leaf;
    collect.ports = {{"in0", PortDirection::InputStream, "contrib"},
                     {"in1", PortDirection::InputStream, "contrib"},
                     {"count0", PortDirection::Scalar, ""},
                     {"count1", PortDirection::Scalar, ""}};
    collect.behavior_key = "pagerank-collect";
    collect.behavior = make_collect_behavior(collector_);
    graph_.add_definition(std::move(collect));

    TaskDefinition top;
    top.name = "page_rank";
    top.kind = TaskKind::Parent;
    // A writer can run a full iteration ahead of its reader, so a mesh
    // channel holds at most two batches plus the final close.
    top.local_channels = {
        {"m01", "contrib", 2 * std::max(1, cross_out_[0]) + 2},
        {"m10", "contrib", 2 * std::max(1, cross_out_[1]) + 2},
        {"ranks0", "contrib", counts_[0] + 1},
        {"ranks1", "contrib", counts_[1] + 1}};
    top.children.push_back(
        {"Rank0",
         {{"mesh_in", Binding::channel("m10")},
          {"mesh_out", Binding::channel("m01")},
          {"ranks_out", Binding::channel("ranks0")}}});
    top.children.push_back(
        {"Rank1",
         {{"mesh_in", Binding::channel("m01")},
          {"mesh_out", Binding::channel("m10")},
          {"ranks_out", Binding::channel("ranks1")}}});
    top.children.push_back(
        {"Collect",
         {{"in0", Binding::channel("ranks0")},
          {"in1", Binding::channel("ranks1")},
          {"count0", Binding::scalar(std::uint64_t(counts_[0]))},
          {"count1", Binding::scalar(std::uint64_t(counts_[1]))}}});
    graph_.add_definition(std::move(top));
    graph_.set_top("page_rank");
  }

  // Independent dense oracle: same update rule, same damping, same start.
  std::vector<double> power_iteration(
      const std::vector<std::pair<int, int>>& edges,
      const std::vector<int>& outdeg) const {
    std::vector<double> rank(n_, 1.0 / n_);
    for (int it = 0; it < iters_; ++it) {
      std::vector<double> acc(n_, 0.0);
      for (const auto& [u, v] : edges) acc[v] += rank[u] / outdeg[u];
      for (int v = 0; v < n_; ++v)
        rank[v] = (1.0 - damping_) / n_ + damping_ * acc[v];
    }
    return rank;
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    for (int part = 0; part < 2; ++part) {
      const std::vector<std::uint64_t> got = collector_->take(
          "page_rank/Collect.0:p" + std::to_string(part));
      if (static_cast<int>(got.size()) != counts_[part])
        return fail("partition " + std::to_string(part) + " reported " +
                    std::to_string(got.size()) + " ranks, expected " +
                    std::to_string(counts_[part]));
      for (int k = 0; k < counts_[part]; ++k) {
        const int v = 2 * k + part;  // local index k holds global vertex v
        const double have = bits_f64(got[k]);
        const double want = expected_[v];
        if (std::abs(have - want) > 1e-9 * std::max(1.0, std::abs(want)))
          return fail("vertex " + std::to_string(v) + " rank " +
                      std::to_string(have) + " differs from oracle " +
                      std::to_string(want));
      }
    }
    return pass("ranks of " + std::to_string(n_) + " vertices match the "
                "power-iteration oracle after " + std::to_string(iters_) +
                " iterations");
  }

  int n_ = 16;
  int iters_ = 20;
  double damping_ = 0.85;
  std::uint64_t seed_ = 0;
  int variant_ = 0;
  int counts_[2] = {0, 0};     // vertices per partition
  int cross_out_[2] = {0, 0};  // cross edges leaving each partition
  std::vector<double> expected_;
};

}  // namespace

void detail::register_pagerank(
    std::vector<BenchEntry>& benches,
    std::map<std::string, CollectedFactory>& behaviors) {
  benches.push_back(
      {"page_rank",
       "two-partition page rank exchanging contributions over a feedback mesh",
       [](const BenchParams& p) {
         return std::make_unique<PageRankBench>(p);
       }});
  behaviors["pagerank-collect"] = [](CollectorPtr c) {
    return make_collect_behavior(std::move(c));
  };
}

}  // namespace weft
