// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Omega-network workload: one Source feeding n lanes, log2(n) stages of
// 2x2 switches in a perfect-shuffle wiring, and one Sink draining the final
// lanes. Records carry (sequence << 8 | destination); each stage routes by
// one destination bit, so a record emerges on the lane its tag names.
//
// Each switch polls its two inputs in strict alternation with *blocking*
// peeks, dropping a side once its end-of-transaction arrives. Because every
// poll waits for that side's next token (or close), the merge decision
// depends only on stream contents — never on scheduling — so every channel's
// exact token sequence is reproducible at any worker count. The builder
// replays the same alternation functionally to precompute every final lane.
#include <algorithm>
#include <memory>
#include <random>
#include <stdexcept>

#include "weft/bench.hpp"

namespace weft {

namespace {

int log2_of(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

std::vector<int> record_destinations(std::uint64_t seed, int records, int lanes) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x4E);
  std::vector<int> dst(records);
  for (int j = 0; j < records; ++j)
    dst[j] = static_cast<int>(rng() % std::uint64_t(lanes));
  return dst;
}

BehaviorFactory make_source_behavior() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    const int lanes = static_cast<int>(ctx.scalar("lanes"));
    const int records = static_cast<int>(ctx.scalar("records"));
    const std::uint64_t seed = ctx.scalar("seed");
    std::vector<OutStream> out;
    for (int j = 0; j < lanes; ++j)
      out.push_back(ctx.out("out" + std::to_string(j)));

    const std::vector<int> dst = record_destinations(seed, records, lanes);
    for (int j = 0; j < records; ++j) {
      const std::uint64_t payload =
          (std::uint64_t(j) << 8) | std::uint64_t(dst[j]);
      co_await out[j % lanes].write(Token::data(payload));
    }
    for (int j = 0; j < lanes; ++j) co_await out[j].close();
  });
}

BehaviorFactory make_switch_behavior() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    const int bit = static_cast<int>(ctx.scalar("bit"));
    InStream in0 = ctx.in("in0");
    InStream in1 = ctx.in("in1");
    OutStream out0 = ctx.out("out0");
    OutStream out1 = ctx.out("out1");
    InStream* in[2] = {&in0, &in1};
    OutStream* out[2] = {&out0, &out1};

    bool open[2] = {true, true};
    int side = 0;
    while (open[0] || open[1]) {
      if (!open[side]) {
        side ^= 1;
        continue;
      }
      if (co_await in[side]->eot()) {
        co_await in[side]->read();
        open[side] = false;
      } else {
        Token t = co_await in[side]->read();
        const int way = static_cast<int>((t.payload >> bit) & 1);
        co_await out[way]->write(t);
      }
      side ^= 1;
    }
    co_await out0.close();
    co_await out1.close();
  });
}

BehaviorFactory make_sink_behavior(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    const int lanes = static_cast<int>(ctx.scalar("lanes"));
    for (int j = 0; j < lanes; ++j) {
      InStream in = ctx.in("in" + std::to_string(j));
      for (;;) {
        Token t = co_await in.read();
        if (t.is_eot) break;
        if (col)
          col->push(ctx.instance_path() + ":lane" + std::to_string(j),
                    t.payload);
      }
    }
  });
}

class NetworkBench final : public Bench {
 public:
  explicit NetworkBench(const BenchParams& params) : Bench("network") {
    lanes_ = params.size > 0 ? params.size : 8;
    records_ = params.records >= 0 ? params.records : 64;
    seed_ = params.seed;
    if (lanes_ != 8 && lanes_ != 16)
      throw BadSizeError("network lane count must be 8 or 16");
    if (records_ > (1 << 20))
      throw BadSizeError("network record count is limited to 1048576");
    stages_ = log2_of(lanes_);
    build();
  }

 private:
  // Replays the switches' alternation on plain vectors: the exact sequence
  // every lane of every layer will carry at runtime.
  void compute_expected(const std::vector<int>& dst) {
    std::vector<std::vector<std::uint64_t>> layer(lanes_);
    for (int j = 0; j < records_; ++j)
      layer[j % lanes_].push_back((std::uint64_t(j) << 8) |
                                  std::uint64_t(dst[j]));
    for (int s = 0; s < stages_; ++s) {
      std::vector<std::vector<std::uint64_t>> next(lanes_);
      const int bit = stages_ - 1 - s;
      for (int k = 0; k < lanes_ / 2; ++k) {
        const std::vector<std::uint64_t>* in[2] = {&layer[k],
                                                   &layer[k + lanes_ / 2]};
        std::size_t idx[2] = {0, 0};
        int side = 0;
        while (idx[0] < in[0]->size() || idx[1] < in[1]->size()) {
          if (idx[side] >= in[side]->size()) {
            side ^= 1;
            continue;
          }
          const std::uint64_t payload = (*in[side])[idx[side]++];
          const int way = static_cast<int>((payload >> bit) & 1);
          next[2 * k + way].push_back(payload);
          side ^= 1;
        }
      }
      layer = std::move(next);
    }
    expected_ = std::move(layer);
  }

  void build() {
    const std::vector<int> dst = record_destinations(seed_, records_, lanes_);
    compute_expected(dst);

    graph_.add_token_type({"record", 32});

    TaskDefinition source;
    source.name = "Source";
    source.kind = TaskKind::Leaf;
    for (int j = 0; j < lanes_; ++j)
      source.ports.push_back(
          {"out" + std::to_string(j), PortDirection::OutputStream, "record"});
    source.ports.push_back({"lanes", PortDirection::Scalar, ""});
    source.ports.push_back({"records", PortDirection::Scalar, ""});
    source.ports.push_back({"seed", PortDirection::Scalar, ""});
    source.behavior_key = "net-source";
    source.behavior = make_source_behavior();
    graph_.add_definition(std::move(source));

    TaskDefinition sw;
    sw.name = "Switch";
    sw.kind = TaskKind::Leaf;
    sw.ports = {{"in0", PortDirection::InputStream, "record"},
                {"in1", PortDirection::InputStream, "record"},
                {"out0", PortDirection::OutputStream, "record"},
                {"out1", PortDirection::OutputStream, "record"},
                {"bit", PortDirection::Scalar, ""}};
    sw.behavior_key = "net-switch";
    sw.behavior = make_switch_behavior();
    graph_.add_definition(std::move(sw));

    TaskDefinition sink;
    sink.name = "Sink";
    sink.kind = TaskKind::Leaf;
    for (int j = 0; j < lanes_; ++j)
      sink.ports.push_back(
          {"in" + std::to_string(j), PortDirection::InputStream, "record"});
    sink.ports.push_back({"lanes", PortDirection::Scalar, ""});
    sink.behavior_key = "net-sink";
    sink.behavior = make_sink_behavior(collector_);
    graph_.add_definition(std::move(sink));

    TaskDefinition top;
    top.name = "network";
    top.kind = TaskKind::Parent;
    auto lane = [](int layer, int j) {
      return "l" + std::to_string(layer) + "_" + std::to_string(j);
    };
    // The sink drains lanes in index order, so upstream writers must never
    // stall on a lane it has not reached yet: provision full depth.
    const int cap = std::max(2, records_ + 1);
    for (int s = 0; s <= stages_; ++s)
      for (int j = 0; j < lanes_; ++j)
        top.local_channels.push_back({lane(s, j), "record", cap});

    ChildDecl src;
    src.definition = "Source";
    for (int j = 0; j < lanes_; ++j)
      src.bindings.emplace_back("out" + std::to_string(j),
                                Binding::channel(lane(0, j)));
    src.bindings.emplace_back("lanes", Binding::scalar(std::uint64_t(lanes_)));
    src.bindings.emplace_back("records",
                              Binding::scalar(std::uint64_t(records_)));
    src.bindings.emplace_back("seed", Binding::scalar(seed_));
    top.children.push_back(std::move(src));

    for (int s = 0; s < stages_; ++s)
      for (int k = 0; k < lanes_ / 2; ++k) {
        ChildDecl child;
        child.definition = "Switch";
        child.bindings = {
            {"in0", Binding::channel(lane(s, k))},
            {"in1", Binding::channel(lane(s, k + lanes_ / 2))},
            {"out0", Binding::channel(lane(s + 1, 2 * k))},
            {"out1", Binding::channel(lane(s + 1, 2 * k + 1))},
            {"bit", Binding::scalar(std::uint64_t(stages_ - 1 - s))}};
        top.children.push_back(std::move(child));
      }

    ChildDecl snk;
    snk.definition = "Sink";
    for (int j = 0; j < lanes_; ++j)
      snk.bindings.emplace_back("in" + std::to_string(j),
                                Binding::channel(lane(stages_, j)));
    snk.bindings.emplace_back("lanes", Binding::scalar(std::uint64_t(lanes_)));
    top.children.push_back(std::move(snk));

    graph_.add_definition(std::move(top));
    graph_.set_top("network");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    for (int d = 0; d < lanes_; ++d) {
      const std::vector<std::uint64_t> got =
          collector_->take("network/Sink.0:lane" + std::to_string(d));
      if (got != expected_[d])
        return fail("lane " + std::to_string(d) + " carried " +
                    std::to_string(got.size()) + " records, expected " +
                    std::to_string(expected_[d].size()) +
                    " in the replayed merge order");
      for (std::uint64_t payload : got)
        if (static_cast<int>(payload & 0xFF) != d)
          return fail("record " + std::to_string(payload >> 8) +
                      " for destination " + std::to_string(payload & 0xFF) +
                      " emerged on lane " + std::to_string(d));
    }
    return pass(std::to_string(records_) + " records self-routed across " +
                std::to_string(stages_) + " stages");
  }

  int lanes_ = 8;
  int records_ = 64;
  int stages_ = 3;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<std::uint64_t>> expected_;  // per final lane
};

}  // namespace

void detail::register_network(
    std::vector<BenchEntry>& benches,
    std::map<std::string, CollectedFactory>& behaviors) {
  benches.push_back(
      {"network",
       "omega network of 2x2 switches self-routing seeded records to their "
       "tagged lanes",
       [](const BenchParams& p) { return std::make_unique<NetworkBench>(p); }});
  behaviors["net-source"] = [](CollectorPtr) { return make_source_behavior(); };
  behaviors["net-switch"] = [](CollectorPtr) { return make_switch_behavior(); };
  behaviors["net-sink"] = [](CollectorPtr c) {
    return make_sink_behavior(std::move(c));
  };
}

}  // namespace weft
