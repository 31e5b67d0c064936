// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/bench.hpp"

#include <algorithm>

namespace weft {

void Collector::push(const std::string& key, std::uint64_t value) {
  std::lock_guard lock(mu_);
  data_[key].push_back(value);
}

std::vector<std::uint64_t> Collector::take(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = data_.find(key);
  return it == data_.end() ? std::vector<std::uint64_t>{} : it->second;
}

std::map<std::string, std::vector<std::uint64_t>> Collector::snapshot() const {
  std::lock_guard lock(mu_);
  return data_;
}

void Collector::clear() {
  std::lock_guard lock(mu_);
  data_.clear();
}

void close_external_inputs(const ProgramGraph& graph, Simulation& sim) {
  const TaskDefinition* top = graph.find_definition(graph.top());
  if (top == nullptr) return;
  for (const auto& p : top->ports)
    if (p.direction == PortDirection::InputStream)
      sim.external_channel(p.name).try_close();
}

std::string channel_hygiene_issue(const RunReport& report) {
  for (const auto& ch : report.channels) {
    if (ch.final_occupancy != 0)
      return ch.path + " still holds " + std::to_string(ch.final_occupancy) +
             " tokens";
    if (ch.stats.eot_written != ch.stats.eot_read)
      return ch.path + " saw " + std::to_string(ch.stats.eot_written) +
             " end-of-transaction writes but " +
             std::to_string(ch.stats.eot_read) + " reads";
  }
  return "";
}

void Bench::reset() { collector_->clear(); }

void Bench::prime(Simulation& sim) { close_external_inputs(graph_, sim); }

void Bench::drain(Simulation&) {}

std::pair<RunReport, BenchResult> Bench::run_and_verify(
    const SchedulerConfig& config) {
  reset();
  Simulation sim(graph_, config);
  prime(sim);
  RunReport report = sim.run();
  drain(sim);

  BenchResult result;
  if (report.outcome == Outcome::Completed) {
    result = check(report);
  } else {
    std::string why(to_string(report.outcome));
    if (!report.failure.empty()) why += ": " + report.failure;
    result = fail("run did not complete (" + why + ")");
  }
  return {std::move(report), std::move(result)};
}

namespace {

struct Registries {
  std::vector<BenchEntry> benches;
  std::map<std::string, CollectedFactory> behaviors;

  Registries() {
    detail::register_ring(benches, behaviors);
    detail::register_cannon(benches, behaviors);
    detail::register_network(benches, behaviors);
    detail::register_pagerank(benches, behaviors);
    detail::register_synthetic(benches, behaviors);
  }
};

const Registries& registries() {
  static const Registries r;
  return r;
}

}  // namespace

const std::vector<BenchEntry>& bench_registry() { return registries().benches; }

std::unique_ptr<Bench> make_bench(const std::string& name,
                                  const BenchParams& params) {
  for (const auto& entry : bench_registry())
    if (entry.name == name) return entry.make(params);
  throw UnknownBenchError("no benchmark named " + name);
}

const std::map<std::string, CollectedFactory>& behavior_registry() {
  return registries().behaviors;
}

int attach_behaviors(ProgramGraph& graph) {
  const auto& registry = behavior_registry();
  int attached = 0;
  for (const auto& def : graph.definitions()) {
    if (def.kind != TaskKind::Leaf || def.behavior || def.behavior_key.empty())
      continue;
    auto it = registry.find(def.behavior_key);
    if (it == registry.end()) continue;
    graph.attach_behavior(def.name, it->second(nullptr));
    ++attached;
  }
  return attached;
}

}  // namespace weft
