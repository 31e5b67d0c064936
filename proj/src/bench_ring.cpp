// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Token-ring workload. n RingNode leaves form a unidirectional ring; each
// node fronts one PE leaf. Every PE injects `packets` packets addressed by a
// seeded (or fixed-offset) pattern, then collects the packets addressed to
// it. The feedback links make this graph impossible for the one-shot
// sequential schedule whenever traffic actually crosses node boundaries.
//
// Termination protocol: every capacity is provisioned so writes never block
// (worst-case in-flight count plus the end-of-transaction marker), and every
// node knows exactly how many ring packets will arrive (a builder-computed
// scalar). Each node forwards its PE's packets, then the expected ring
// arrivals, then closes both outputs — exactly one end-of-transaction per
// channel, nothing stranded.
#include <algorithm>
#include <memory>
#include <random>
#include <stdexcept>

#include "weft/bench.hpp"

namespace weft {

namespace {

// Packet layout: src in bits 12.., sequence in bits 4..11, dst in bits 0..3.
constexpr int kMaxNodes = 16;
constexpr int kMaxPackets = 256;

std::uint64_t packet_payload(int src, int k, int dst) {
  return (std::uint64_t(src) << 12) | (std::uint64_t(k) << 4) |
         std::uint64_t(dst);
}

// The destination schedule one PE follows. Shared by the builder (to size
// channels and compute expectations) and the behavior (to emit packets), so
// the two can never drift apart.
std::vector<int> pe_destinations(std::uint64_t seed, int id, int n, int count,
                                 int offset) {
  std::vector<int> dst(count);
  if (offset != 0) {
    for (int k = 0; k < count; ++k) dst[k] = (id + offset) % n;
    return dst;
  }
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + std::uint64_t(id) + 1);
  for (int k = 0; k < count; ++k)
    dst[k] = (id + 1 + static_cast<int>(rng() % std::uint64_t(n - 1))) % n;
  return dst;
}

BehaviorFactory make_pe_behavior(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    const int id = static_cast<int>(ctx.scalar("id"));
    const int n = static_cast<int>(ctx.scalar("n"));
    const int count = static_cast<int>(ctx.scalar("count"));
    const int expect = static_cast<int>(ctx.scalar("expect"));
    const std::uint64_t seed = ctx.scalar("seed");
    const int offset = static_cast<int>(ctx.scalar("offset"));
    OutStream inject = ctx.out("inject");
    InStream deliver = ctx.in("deliver");

    const std::vector<int> dst = pe_destinations(seed, id, n, count, offset);
    for (int k = 0; k < count; ++k)
      co_await inject.write(Token::data(packet_payload(id, k, dst[k])));
    co_await inject.close();

    for (int k = 0; k < expect; ++k) {
      Token t = co_await deliver.read();
      if (t.is_eot) throw std::runtime_error("deliver ended early");
      if ((t.payload & 0xF) != std::uint64_t(id))
        throw std::runtime_error("misrouted packet " +
                                 std::to_string(t.payload));
      if (col) col->push(ctx.instance_path(), t.payload);
    }
    Token end = co_await deliver.read();
    if (!end.is_eot)
      throw std::runtime_error("expected end of transaction on deliver");
  });
}

BehaviorFactory make_node_behavior() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    const int id = static_cast<int>(ctx.scalar("id"));
    const int ring_arrivals = static_cast<int>(ctx.scalar("node_in_count"));
    InStream from_pe = ctx.in("from_pe");
    InStream ring_in = ctx.in("ring_in");
    OutStream ring_out = ctx.out("ring_out");
    OutStream to_pe = ctx.out("to_pe");

    auto route = [&](Token t) {
      return (t.payload & 0xF) == std::uint64_t(id) ? &to_pe : &ring_out;
    };

    // Everything this node's own PE injects, before touching ring traffic:
    // locally injected packets enter the network as soon as possible. The
    // route is decided by peeking the head packet; only then is it dequeued.
    for (;;) {
      if (co_await from_pe.eot()) {
        co_await from_pe.read();
        break;
      }
      Token head = co_await from_pe.peek();
      OutStream* out = route(head);
      co_await from_pe.read();
      co_await out->write(head);
    }
    // Exactly the ring packets the builder promised, same peek-then-dequeue
    // routing.
    for (int k = 0; k < ring_arrivals; ++k) {
      Token head = co_await ring_in.peek();
      if (head.is_eot) throw std::runtime_error("ring ended early");
      OutStream* out = route(head);
      co_await ring_in.read();
      co_await out->write(head);
    }
    co_await ring_out.close();
    co_await to_pe.close();
    Token end = co_await ring_in.read();
    if (!end.is_eot)
      throw std::runtime_error("expected end of transaction on ring_in");
  });
}

class RingBench final : public Bench {
 public:
  explicit RingBench(const BenchParams& p) : Bench("ring") {
    n_ = p.size > 0 ? p.size : 4;
    packets_ = p.packets >= 0 ? p.packets : 8;
    seed_ = p.seed;
    offset_ = p.offset;
    if (n_ < 2 || n_ > kMaxNodes)
      throw BadSizeError("ring size must be between 2 and " +
                         std::to_string(kMaxNodes));
    if (packets_ >= kMaxPackets)
      throw BadSizeError("ring packets per endpoint must be below " +
                         std::to_string(kMaxPackets));
    if (offset_ < 0) throw BadSizeError("ring offset must be non-negative");
    build();
  }

 private:
  void build() {
    // Walk every packet's route once: per-PE expectations, per-node ring
    // arrivals, and per-link crossing counts (for capacities).
    expected_.assign(n_, {});
    std::vector<int> node_in(n_, 0), link_cross(n_, 0);
    for (int src = 0; src < n_; ++src) {
      const std::vector<int> dst =
          pe_destinations(seed_, src, n_, packets_, offset_);
      for (int k = 0; k < packets_; ++k) {
        expected_[dst[k]].push_back(packet_payload(src, k, dst[k]));
        for (int at = src; at != dst[k]; at = (at + 1) % n_) {
          link_cross[at]++;
          node_in[(at + 1) % n_]++;
        }
      }
    }

    graph_.add_token_type({"packet", 32});

    TaskDefinition node;
    node.name = "RingNode";
    node.kind = TaskKind::Leaf;
    node.ports = {{"from_pe", PortDirection::InputStream, "packet"},
                  {"ring_in", PortDirection::InputStream, "packet"},
                  {"ring_out", PortDirection::OutputStream, "packet"},
                  {"to_pe", PortDirection::OutputStream, "packet"},
                  {"id", PortDirection::Scalar, ""},
                  {"n", PortDirection::Scalar, ""},
                  {"node_in_count", PortDirection::Scalar, ""}};
    node.behavior_key = "ring-node";
    node.behavior = make_node_behavior();
    graph_.add_definition(std::move(node));

    TaskDefinition pe;
    pe.name = "PE";
    pe.kind = TaskKind::Leaf;
    pe.ports = {{"inject", PortDirection::OutputStream, "packet"},
                {"deliver", PortDirection::InputStream, "packet"},
                {"id", PortDirection::Scalar, ""},
                {"n", PortDirection::Scalar, ""},
                {"count", PortDirection::Scalar, ""},
                {"expect", PortDirection::Scalar, ""},
                {"seed", PortDirection::Scalar, ""},
                {"offset", PortDirection::Scalar, ""}};
    pe.behavior_key = "ring-pe";
    pe.behavior = make_pe_behavior(collector_);
    graph_.add_definition(std::move(pe));

    TaskDefinition ring;
    ring.name = "ring";
    ring.kind = TaskKind::Parent;
    auto cap = [](int tokens) { return std::max(2, tokens + 1); };
    for (int i = 0; i < n_; ++i) {
      const std::string id = std::to_string(i);
      ring.local_channels.push_back(
          {"link" + id, "packet", cap(link_cross[i])});
      ring.local_channels.push_back({"inject" + id, "packet", cap(packets_)});
      ring.local_channels.push_back(
          {"deliver" + id, "packet",
           cap(static_cast<int>(expected_[i].size()))});
    }
    for (int i = 0; i < n_; ++i) {
      const std::string id = std::to_string(i);
      const std::string prev = std::to_string((i + n_ - 1) % n_);
      ChildDecl c;
      c.definition = "RingNode";
      c.bindings = {{"from_pe", Binding::channel("inject" + id)},
                    {"ring_in", Binding::channel("link" + prev)},
                    {"ring_out", Binding::channel("link" + id)},
                    {"to_pe", Binding::channel("deliver" + id)},
                    {"id", Binding::scalar(std::uint64_t(i))},
                    {"n", Binding::scalar(std::uint64_t(n_))},
                    {"node_in_count", Binding::scalar(std::uint64_t(node_in[i]))}};
      ring.children.push_back(std::move(c));
    }
    for (int i = 0; i < n_; ++i) {
      const std::string id = std::to_string(i);
      ChildDecl c;
      c.definition = "PE";
      c.bindings = {
          {"inject", Binding::channel("inject" + id)},
          {"deliver", Binding::channel("deliver" + id)},
          {"id", Binding::scalar(std::uint64_t(i))},
          {"n", Binding::scalar(std::uint64_t(n_))},
          {"count", Binding::scalar(std::uint64_t(packets_))},
          {"expect", Binding::scalar(expected_[i].size())},
          {"seed", Binding::scalar(seed_)},
          {"offset", Binding::scalar(std::uint64_t(offset_))}};
      ring.children.push_back(std::move(c));
    }
    graph_.add_definition(std::move(ring));
    graph_.set_top("ring");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction, saw " +
                    std::to_string(ch.stats.eot_written) + " written / " +
                    std::to_string(ch.stats.eot_read) + " read");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    std::uint64_t delivered = 0;
    for (int i = 0; i < n_; ++i) {
      std::vector<std::uint64_t> got =
          collector_->take("ring/PE." + std::to_string(i));
      std::vector<std::uint64_t> want = expected_[i];
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      if (got != want)
        return fail("PE " + std::to_string(i) + " collected " +
                    std::to_string(got.size()) + " packets, expected " +
                    std::to_string(want.size()) +
                    " with matching payloads");
      delivered += got.size();
    }
    return pass(std::to_string(delivered) + " packets delivered across " +
                std::to_string(n_) + " endpoints");
  }

  int n_ = 4;
  int packets_ = 8;
  std::uint64_t seed_ = 0;
  int offset_ = 0;
  std::vector<std::vector<std::uint64_t>> expected_;  // per destination PE
};

}  // namespace

void detail::register_ring(std::vector<BenchEntry>& benches,
                           std::map<std::string, CollectedFactory>& behaviors) {
  benches.push_back(
      {"ring",
       "unidirectional token ring; PEs exchange seeded packets through "
       "routing nodes",
       [](const BenchParams& p) { return std::make_unique<RingBench>(p); }});
  behaviors["ring-node"] = [](CollectorPtr) { return make_node_behavior(); };
  behaviors["ring-pe"] = [](CollectorPtr c) {
    return make_pe_behavior(std::move(c));
  };
}

}  // namespace weft
