// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic workloads exercising framework mechanics rather than a domain
// kernel:
//
//  - pipeline: one producer streaming 0..packets-1 through a capacity-2
//    channel into one consumer. The smallest complete program; its oracle is
//    order preservation.
//  - stress: a single Relay definition instantiated `instances` times in a
//    closed cycle. Instance 0 originates `packets` tokens, every other
//    instance forwards, and instance 0 collects them after the round trip.
//    One definition, arbitrarily many instances: the deduplication and
//    scalability workhorse.
//  - gcn: a fixed scatter/apply/gather shape (5 definitions, 12 instances,
//    25 channels) whose gathers drain their inputs in a fixed order and
//    whose sink cross-checks a control token against the merged counts.
#include <algorithm>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "weft/bench.hpp"

namespace weft {

namespace {

// ---------------------------------------------------------------------------
// pipeline

BehaviorFactory make_pipe_producer() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    const std::uint64_t count = ctx.scalar("count");
    OutStream out = ctx.out("out");
    for (std::uint64_t k = 0; k < count; ++k) co_await out.write(Token::data(k));
    co_await out.close();
  });
}

BehaviorFactory make_pipe_consumer(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    InStream in = ctx.in("in");
    for (;;) {
      Token t = co_await in.read();
      if (t.is_eot) break;
      if (col) col->push(ctx.instance_path(), t.payload);
    }
  });
}

class PipelineBench final : public Bench {
 public:
  explicit PipelineBench(const BenchParams& p) : Bench("pipeline") {
    packets_ = p.packets >= 0 ? p.packets : 100;
    if (packets_ > (1 << 20))
      throw BadSizeError("pipeline packet count must be at most 2^20");
    build();
  }

 private:
  void build() {
    graph_.add_token_type({"word", 32});

    TaskDefinition producer;
    producer.name = "Producer";
    producer.kind = TaskKind::Leaf;
    producer.ports = {{"out", PortDirection::OutputStream, "word"},
                      {"count", PortDirection::Scalar, ""}};
    producer.behavior_key = "pipe-producer";
    producer.behavior = make_pipe_producer();
    graph_.add_definition(std::move(producer));

    TaskDefinition consumer;
    consumer.name = "Consumer";
    consumer.kind = TaskKind::Leaf;
    consumer.ports = {{"in", PortDirection::InputStream, "word"}};
    consumer.behavior_key = "pipe-consumer";
    consumer.behavior = make_pipe_consumer(collector_);
    graph_.add_definition(std::move(consumer));

    TaskDefinition top;
    top.name = "pipeline";
    top.kind = TaskKind::Parent;
    top.local_channels = {{"link", "word", 2}};
    ChildDecl prod;
    prod.definition = "Producer";
    prod.bindings = {{"out", Binding::channel("link")},
                     {"count", Binding::scalar(std::uint64_t(packets_))}};
    top.children.push_back(std::move(prod));
    ChildDecl cons;
    cons.definition = "Consumer";
    cons.bindings = {{"in", Binding::channel("link")}};
    top.children.push_back(std::move(cons));
    graph_.add_definition(std::move(top));
    graph_.set_top("pipeline");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    std::vector<std::uint64_t> got = collector_->take("pipeline/Consumer.0");
    if (static_cast<int>(got.size()) != packets_)
      return fail("consumer saw " + std::to_string(got.size()) +
                  " tokens, expected " + std::to_string(packets_));
    for (int k = 0; k < packets_; ++k)
      if (got[std::size_t(k)] != std::uint64_t(k))
        return fail("token " + std::to_string(k) + " arrived as " +
                    std::to_string(got[std::size_t(k)]) +
                    "; order not preserved");
    return pass(std::to_string(packets_) + " tokens in order");
  }

  int packets_ = 100;
};

// ---------------------------------------------------------------------------
// stress

BehaviorFactory make_relay_behavior(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    const std::uint64_t id = ctx.scalar("id");
    const std::uint64_t count = ctx.scalar("count");
    InStream in = ctx.in("in");
    OutStream out = ctx.out("out");

    if (id == 0) {
      // Originator: emit the whole batch, close, then take everything back
      // after the round trip.
      for (std::uint64_t k = 0; k < count; ++k)
        co_await out.write(Token::data(k));
      co_await out.close();
      for (;;) {
        Token t = co_await in.read();
        if (t.is_eot) break;
        if (col) col->push(ctx.instance_path(), t.payload);
      }
    } else {
      // Pure pass-through; end-of-transaction propagates around the cycle.
      for (;;) {
        Token t = co_await in.read();
        if (t.is_eot) break;
        co_await out.write(t);
      }
      co_await out.close();
    }
  });
}

class StressBench final : public Bench {
 public:
  explicit StressBench(const BenchParams& p) : Bench("stress") {
    instances_ = p.instances > 0 ? p.instances : 8;
    packets_ = p.packets >= 0 ? p.packets : 16;
    if (instances_ < 2 || instances_ > 4096)
      throw BadSizeError("stress instance count must be between 2 and 4096");
    if (packets_ > (1 << 16))
      throw BadSizeError("stress packet count must be at most 2^16");
    build();
  }

 private:
  void build() {
    graph_.add_token_type({"word", 32});

    TaskDefinition relay;
    relay.name = "Relay";
    relay.kind = TaskKind::Leaf;
    relay.ports = {{"in", PortDirection::InputStream, "word"},
                   {"out", PortDirection::OutputStream, "word"},
                   {"id", PortDirection::Scalar, ""},
                   {"count", PortDirection::Scalar, ""}};
    relay.behavior_key = "relay";
    relay.behavior = make_relay_behavior(collector_);
    graph_.add_definition(std::move(relay));

    TaskDefinition top;
    top.name = "stress";
    top.kind = TaskKind::Parent;
    // Channel i carries instance i's output. The originator drains nothing
    // until it has emitted the full batch, so its own input channel (the last
    // one) must hold the entire batch; every other hop backpressures at the
    // default capacity.
    for (int i = 0; i < instances_; ++i) {
      const int cap = i == instances_ - 1 ? std::max(2, packets_ + 1) : 2;
      top.local_channels.push_back({"hop" + std::to_string(i), "word", cap});
    }
    for (int i = 0; i < instances_; ++i) {
      ChildDecl c;
      c.definition = "Relay";
      c.bindings = {
          {"in", Binding::channel("hop" + std::to_string((i + instances_ - 1) %
                                                         instances_))},
          {"out", Binding::channel("hop" + std::to_string(i))},
          {"id", Binding::scalar(std::uint64_t(i))},
          {"count", Binding::scalar(std::uint64_t(packets_))}};
      top.children.push_back(std::move(c));
    }
    graph_.add_definition(std::move(top));
    graph_.set_top("stress");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    std::vector<std::uint64_t> got = collector_->take("stress/Relay.0");
    if (static_cast<int>(got.size()) != packets_)
      return fail("originator saw " + std::to_string(got.size()) +
                  " tokens after the round trip, expected " +
                  std::to_string(packets_));
    for (int k = 0; k < packets_; ++k)
      if (got[std::size_t(k)] != std::uint64_t(k))
        return fail("token " + std::to_string(k) + " came back as " +
                    std::to_string(got[std::size_t(k)]));
    return pass(std::to_string(packets_) + " tokens through " +
                std::to_string(instances_) + " relays");
  }

  int instances_ = 8;
  int packets_ = 16;
};

// ---------------------------------------------------------------------------
// gcn

// Per-record arithmetic shared by behaviors and the oracle.
std::uint64_t scatter_val(std::uint64_t feat, std::uint64_t idx) {
  return feat + idx;
}
std::uint64_t apply_acc(std::uint64_t val, std::uint64_t tag) {
  return val * 2 + (tag & 3);
}

// The lane-major feature/index streams, identical for builder and behavior.
struct GcnInput {
  std::vector<std::uint64_t> feat, idx;  // per lane, n records each
};
std::vector<GcnInput> gcn_inputs(std::uint64_t seed, int lanes, int n) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x6C);
  std::vector<GcnInput> in(static_cast<std::size_t>(lanes));
  for (auto& lane : in) {
    lane.feat.resize(std::size_t(n));
    lane.idx.resize(std::size_t(n));
    for (int k = 0; k < n; ++k) {
      lane.feat[std::size_t(k)] = rng() % 1000;
      lane.idx[std::size_t(k)] = rng() % 64;
    }
  }
  return in;
}

BehaviorFactory make_gcn_loader() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    const int n = static_cast<int>(ctx.scalar("n"));
    const std::uint64_t seed = ctx.scalar("seed");
    constexpr int kLanes = 4;
    const std::vector<GcnInput> input = gcn_inputs(seed, kLanes, n);
    // Lane-major emission matches the downstream gather order, so default
    // channel capacities never wedge the pipeline.
    for (int j = 0; j < kLanes; ++j) {
      OutStream feat = ctx.out("feat" + std::to_string(j));
      OutStream idx = ctx.out("idx" + std::to_string(j));
      for (int k = 0; k < n; ++k) {
        co_await feat.write(Token::data(input[std::size_t(j)].feat[std::size_t(k)]));
        co_await idx.write(Token::data(input[std::size_t(j)].idx[std::size_t(k)]));
      }
      co_await feat.close();
      co_await idx.close();
    }
    OutStream ctl = ctx.out("ctl");
    co_await ctl.write(Token::data(std::uint64_t(kLanes) * std::uint64_t(n)));
    co_await ctl.close();
  });
}

BehaviorFactory make_gcn_scatter() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    InStream feat = ctx.in("feat");
    InStream idx = ctx.in("idx");
    OutStream val = ctx.out("val");
    OutStream tag = ctx.out("tag");
    for (;;) {
      Token f = co_await feat.read();
      if (f.is_eot) break;
      Token t = co_await idx.read();
      if (t.is_eot) throw std::runtime_error("index stream ended early");
      co_await val.write(Token::data(scatter_val(f.payload, t.payload)));
      co_await tag.write(Token::data(t.payload));
    }
    Token end = co_await idx.read();
    if (!end.is_eot)
      throw std::runtime_error("index stream longer than feature stream");
    co_await val.close();
    co_await tag.close();
  });
}

BehaviorFactory make_gcn_apply() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    InStream val = ctx.in("val");
    InStream tag = ctx.in("tag");
    OutStream acc = ctx.out("acc");
    for (;;) {
      Token v = co_await val.read();
      if (v.is_eot) break;
      Token t = co_await tag.read();
      if (t.is_eot) throw std::runtime_error("tag stream ended early");
      co_await acc.write(Token::data(apply_acc(v.payload, t.payload)));
    }
    Token end = co_await tag.read();
    if (!end.is_eot)
      throw std::runtime_error("tag stream longer than value stream");
    co_await acc.close();
  });
}

BehaviorFactory make_gcn_gather() {
  return coro_behavior([](TaskContext& ctx) -> BehaviorCoro {
    OutStream sum = ctx.out("sum");
    OutStream cnt = ctx.out("cnt");
    std::uint64_t total = 0, count = 0;
    // Drain in0 to its end-of-transaction before touching in1: a fixed merge
    // order the loader's lane-major emission is provisioned for.
    for (const char* port : {"in0", "in1"}) {
      InStream in = ctx.in(port);
      for (;;) {
        Token t = co_await in.read();
        if (t.is_eot) break;
        total += t.payload;
        ++count;
      }
    }
    co_await sum.write(Token::data(total));
    co_await sum.close();
    co_await cnt.write(Token::data(count));
    co_await cnt.close();
  });
}

BehaviorFactory make_gcn_sink(CollectorPtr col) {
  return coro_behavior([col](TaskContext& ctx) -> BehaviorCoro {
    InStream ctl = ctx.in("ctl");
    Token expected = co_await ctl.read();
    if (expected.is_eot) throw std::runtime_error("empty control stream");
    Token ctl_end = co_await ctl.read();
    if (!ctl_end.is_eot)
      throw std::runtime_error("control stream carries extra tokens");

    std::uint64_t merged = 0;
    for (int g = 0; g < 2; ++g) {
      for (const char* base : {"sum", "cnt"}) {
        InStream in = ctx.in(std::string(base) + std::to_string(g));
        Token t = co_await in.read();
        if (t.is_eot) throw std::runtime_error("gather stream ended early");
        Token end = co_await in.read();
        if (!end.is_eot)
          throw std::runtime_error("gather stream carries extra tokens");
        if (col) col->push(ctx.instance_path(), t.payload);
        if (base[0] == 'c') merged += t.payload;
      }
    }
    if (merged != expected.payload)
      throw std::runtime_error("merged record count " + std::to_string(merged) +
                               " does not match control token " +
                               std::to_string(expected.payload));
  });
}

class GcnBench final : public Bench {
 public:
  explicit GcnBench(const BenchParams& p) : Bench("gcn") {
    n_ = p.size > 0 ? p.size : 8;
    seed_ = p.seed;
    if (n_ > 1024)
      throw BadSizeError("gcn records per lane must be at most 1024");
    build();
  }

 private:
  void build() {
    // Oracle: replay the pipeline arithmetic per lane pair.
    const std::vector<GcnInput> input = gcn_inputs(seed_, 4, n_);
    expected_.clear();
    for (int g = 0; g < 2; ++g) {
      std::uint64_t total = 0, count = 0;
      for (int lane = 2 * g; lane < 2 * g + 2; ++lane) {
        for (int k = 0; k < n_; ++k) {
          const std::uint64_t f = input[std::size_t(lane)].feat[std::size_t(k)];
          const std::uint64_t t = input[std::size_t(lane)].idx[std::size_t(k)];
          total += apply_acc(scatter_val(f, t), t);
          ++count;
        }
      }
      expected_.push_back(total);
      expected_.push_back(count);
    }

    graph_.add_token_type({"value", 32});

    TaskDefinition loader;
    loader.name = "Loader";
    loader.kind = TaskKind::Leaf;
    for (int j = 0; j < 4; ++j) {
      loader.ports.push_back(
          {"feat" + std::to_string(j), PortDirection::OutputStream, "value"});
      loader.ports.push_back(
          {"idx" + std::to_string(j), PortDirection::OutputStream, "value"});
    }
    loader.ports.push_back({"ctl", PortDirection::OutputStream, "value"});
    loader.ports.push_back({"n", PortDirection::Scalar, ""});
    loader.ports.push_back({"seed", PortDirection::Scalar, ""});
    loader.behavior_key = "gcn-loader";
    loader.behavior = make_gcn_loader();
    graph_.add_definition(std::move(loader));

    TaskDefinition scatter;
    scatter.name = "Scatter";
    scatter.kind = TaskKind::Leaf;
    scatter.ports = {{"feat", PortDirection::InputStream, "value"},
                     {"idx", PortDirection::InputStream, "value"},
                     {"val", PortDirection::OutputStream, "value"},
                     {"tag", PortDirection::OutputStream, "value"}};
    scatter.behavior_key = "gcn-scatter";
    scatter.behavior = make_gcn_scatter();
    graph_.add_definition(std::move(scatter));

    TaskDefinition apply;
    apply.name = "Apply";
    apply.kind = TaskKind::Leaf;
    apply.ports = {{"val", PortDirection::InputStream, "value"},
                   {"tag", PortDirection::InputStream, "value"},
                   {"acc", PortDirection::OutputStream, "value"}};
    apply.behavior_key = "gcn-apply";
    apply.behavior = make_gcn_apply();
    graph_.add_definition(std::move(apply));

    TaskDefinition gather;
    gather.name = "Gather";
    gather.kind = TaskKind::Leaf;
    gather.ports = {{"in0", PortDirection::InputStream, "value"},
                    {"in1", PortDirection::InputStream, "value"},
                    {"sum", PortDirection::OutputStream, "value"},
                    {"cnt", PortDirection::OutputStream, "value"}};
    gather.behavior_key = "gcn-gather";
    gather.behavior = make_gcn_gather();
    graph_.add_definition(std::move(gather));

    TaskDefinition sink;
    sink.name = "SinkG";
    sink.kind = TaskKind::Leaf;
    sink.ports = {{"ctl", PortDirection::InputStream, "value"},
                  {"sum0", PortDirection::InputStream, "value"},
                  {"cnt0", PortDirection::InputStream, "value"},
                  {"sum1", PortDirection::InputStream, "value"},
                  {"cnt1", PortDirection::InputStream, "value"}};
    sink.behavior_key = "gcn-sink";
    sink.behavior = make_gcn_sink(collector_);
    graph_.add_definition(std::move(sink));

    TaskDefinition top;
    top.name = "gcn";
    top.kind = TaskKind::Parent;
    for (int j = 0; j < 4; ++j) {
      const std::string id = std::to_string(j);
      top.local_channels.push_back({"feat" + id, "value", 2});
      top.local_channels.push_back({"idx" + id, "value", 2});
      top.local_channels.push_back({"val" + id, "value", 2});
      top.local_channels.push_back({"tag" + id, "value", 2});
      top.local_channels.push_back({"acc" + id, "value", 2});
    }
    for (int g = 0; g < 2; ++g) {
      const std::string id = std::to_string(g);
      top.local_channels.push_back({"sum" + id, "value", 2});
      top.local_channels.push_back({"cnt" + id, "value", 2});
    }
    top.local_channels.push_back({"ctl", "value", 2});

    ChildDecl loader_child;
    loader_child.definition = "Loader";
    for (int j = 0; j < 4; ++j) {
      const std::string id = std::to_string(j);
      loader_child.bindings.push_back({"feat" + id, Binding::channel("feat" + id)});
      loader_child.bindings.push_back({"idx" + id, Binding::channel("idx" + id)});
    }
    loader_child.bindings.push_back({"ctl", Binding::channel("ctl")});
    loader_child.bindings.push_back({"n", Binding::scalar(std::uint64_t(n_))});
    loader_child.bindings.push_back({"seed", Binding::scalar(seed_)});
    top.children.push_back(std::move(loader_child));

    for (int j = 0; j < 4; ++j) {
      const std::string id = std::to_string(j);
      ChildDecl c;
      c.definition = "Scatter";
      c.bindings = {{"feat", Binding::channel("feat" + id)},
                    {"idx", Binding::channel("idx" + id)},
                    {"val", Binding::channel("val" + id)},
                    {"tag", Binding::channel("tag" + id)}};
      top.children.push_back(std::move(c));
    }
    for (int j = 0; j < 4; ++j) {
      const std::string id = std::to_string(j);
      ChildDecl c;
      c.definition = "Apply";
      c.bindings = {{"val", Binding::channel("val" + id)},
                    {"tag", Binding::channel("tag" + id)},
                    {"acc", Binding::channel("acc" + id)}};
      top.children.push_back(std::move(c));
    }
    for (int g = 0; g < 2; ++g) {
      const std::string id = std::to_string(g);
      ChildDecl c;
      c.definition = "Gather";
      c.bindings = {{"in0", Binding::channel("acc" + std::to_string(2 * g))},
                    {"in1", Binding::channel("acc" + std::to_string(2 * g + 1))},
                    {"sum", Binding::channel("sum" + id)},
                    {"cnt", Binding::channel("cnt" + id)}};
      top.children.push_back(std::move(c));
    }
    ChildDecl sink_child;
    sink_child.definition = "SinkG";
    sink_child.bindings = {{"ctl", Binding::channel("ctl")},
                           {"sum0", Binding::channel("sum0")},
                           {"cnt0", Binding::channel("cnt0")},
                           {"sum1", Binding::channel("sum1")},
                           {"cnt1", Binding::channel("cnt1")}};
    top.children.push_back(std::move(sink_child));
    graph_.add_definition(std::move(top));
    graph_.set_top("gcn");
  }

  BenchResult check(const RunReport& report) override {
    for (const auto& ch : report.channels)
      if (ch.stats.eot_written != 1 || ch.stats.eot_read != 1)
        return fail(ch.path + ": expected exactly one end-of-transaction");
    if (std::string issue = channel_hygiene_issue(report); !issue.empty())
      return fail(issue);

    // Sink collects sum0, cnt0, sum1, cnt1 in that order.
    std::vector<std::uint64_t> got = collector_->take("gcn/SinkG.0");
    if (got != expected_)
      return fail("sink merged " + std::to_string(got.size()) +
                  " values; sums/counts do not match the replayed pipeline");
    return pass("sums and counts match for " + std::to_string(4 * n_) +
                " records");
  }

  int n_ = 8;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> expected_;  // sum0, cnt0, sum1, cnt1
};

}  // namespace

namespace detail {

void register_synthetic(std::vector<BenchEntry>& benches,
                        std::map<std::string, CollectedFactory>& behaviors) {
  benches.push_back(
      {"pipeline", "two-stage producer/consumer, in-order delivery",
       [](const BenchParams& p) -> std::unique_ptr<Bench> {
         return std::make_unique<PipelineBench>(p);
       }});
  benches.push_back(
      {"stress", "one relay definition instantiated as a long cycle",
       [](const BenchParams& p) -> std::unique_ptr<Bench> {
         return std::make_unique<StressBench>(p);
       }});
  benches.push_back(
      {"gcn", "fixed scatter/apply/gather shape with a control cross-check",
       [](const BenchParams& p) -> std::unique_ptr<Bench> {
         return std::make_unique<GcnBench>(p);
       }});

  behaviors["pipe-producer"] = [](CollectorPtr) { return make_pipe_producer(); };
  behaviors["pipe-consumer"] = [](CollectorPtr col) {
    return make_pipe_consumer(std::move(col));
  };
  behaviors["relay"] = [](CollectorPtr col) {
    return make_relay_behavior(std::move(col));
  };
  behaviors["gcn-loader"] = [](CollectorPtr) { return make_gcn_loader(); };
  behaviors["gcn-scatter"] = [](CollectorPtr) { return make_gcn_scatter(); };
  behaviors["gcn-apply"] = [](CollectorPtr) { return make_gcn_apply(); };
  behaviors["gcn-gather"] = [](CollectorPtr) { return make_gcn_gather(); };
  behaviors["gcn-sink"] = [](CollectorPtr col) {
    return make_gcn_sink(std::move(col));
  };
}

}  // namespace detail

}  // namespace weft
