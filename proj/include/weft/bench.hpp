// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "weft/graph.hpp"
#include "weft/scheduler.hpp"

namespace weft {

/// Thread-safe capture of what sink behaviors observed, keyed by a label the
/// bench picks (usually the instance path). Behaviors hold it through a
/// shared_ptr — a null collector simply drops the observations, which is how
/// registry-built behaviors run for imported graphs.
class Collector {
 public:
  void push(const std::string& key, std::uint64_t value);
  std::vector<std::uint64_t> take(const std::string& key) const;
  std::map<std::string, std::vector<std::uint64_t>> snapshot() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<std::uint64_t>> data_;
};

using CollectorPtr = std::shared_ptr<Collector>;

/// Workload knobs. size/instances 0 and packets/records/iters -1 mean "take
/// the bench's default"; zero packets or records is a real (empty) workload.
struct BenchParams {
  int size = 0;             // workload scale; meaning is per bench
  int instances = 0;        // stress: relay chain length
  std::uint64_t seed = 0;   // workload content seed (not the scheduler seed)
  int packets = -1;         // per-producer packet count
  int records = -1;         // network: total records injected
  int offset = 0;           // ring: fixed destination offset; 0 = seeded
  int iters = -1;           // page rank: iteration count
  double damping = 0.85;    // page rank: damping factor
  int variant = 0;          // page rank topology: 0 seeded, 1 cycle, 2 star
};

/// Verdict of one oracle check.
struct BenchResult {
  bool ok = false;
  std::string detail;  // first mismatch, or a one-line summary when ok
};

/// A self-checking workload: a program graph plus the oracle that validates
/// a finished run against independently computed expectations.
class Bench {
 public:
  virtual ~Bench() = default;

  const std::string& name() const { return name_; }
  const ProgramGraph& graph() const { return graph_; }
  CollectorPtr collector() const { return collector_; }

  /// Runs a fresh simulation of the graph under `config` and checks it.
  /// A run that does not complete fails the check with the outcome as the
  /// detail; the report still tells the full story.
  std::pair<RunReport, BenchResult> run_and_verify(const SchedulerConfig& config);

 protected:
  Bench(std::string name) : name_(std::move(name)) {}

  /// Called before every run. Default clears the collector.
  virtual void reset();
  /// Feeds external inputs. Default closes every external input port so
  /// boundary readers see end-of-transaction immediately.
  virtual void prime(Simulation& sim);
  /// Drains external outputs after the run. Default does nothing.
  virtual void drain(Simulation& sim);
  /// Oracle check; only called when the run completed.
  virtual BenchResult check(const RunReport& report) = 0;

  static BenchResult pass(std::string summary) { return {true, std::move(summary)}; }
  static BenchResult fail(std::string detail) { return {false, std::move(detail)}; }

  std::string name_;
  ProgramGraph graph_;
  CollectorPtr collector_ = std::make_shared<Collector>();
};

/// Closes (writes end-of-transaction to) every external input channel. The
/// harness-side half of running a graph whose top reads from the outside.
void close_external_inputs(const ProgramGraph& graph, Simulation& sim);

/// Channel hygiene shared by several oracles: after a completed run every
/// channel must be drained and every end-of-transaction consumed. Returns an
/// empty string when clean, else the first offending channel and why.
std::string channel_hygiene_issue(const RunReport& report);

struct BenchEntry {
  std::string name;
  std::string summary;
  std::function<std::unique_ptr<Bench>(const BenchParams&)> make;
};

/// All built-in workloads, in listing order.
const std::vector<BenchEntry>& bench_registry();

/// Builds one by name with the given parameters (zero-value fields take the
/// bench's defaults). Throws UnknownBenchError.
std::unique_ptr<Bench> make_bench(const std::string& name,
                                  const BenchParams& params = {});

/// Builds a behavior factory for a registered behavior key. The collector
/// may be null.
using CollectedFactory = std::function<BehaviorFactory(CollectorPtr)>;

/// Every built-in leaf behavior keyed by the behavior_key its definition
/// carries. Keys not listed here (closure-baked behaviors) cannot be rebuilt
/// from a structural file.
const std::map<std::string, CollectedFactory>& behavior_registry();

/// Attaches registry behaviors (with no collector) to every leaf definition
/// that has none yet and whose key is known. Returns how many were attached.
int attach_behaviors(ProgramGraph& graph);

namespace detail {
void register_ring(std::vector<BenchEntry>& benches,
                   std::map<std::string, CollectedFactory>& behaviors);
void register_cannon(std::vector<BenchEntry>& benches,
                     std::map<std::string, CollectedFactory>& behaviors);
void register_network(std::vector<BenchEntry>& benches,
                      std::map<std::string, CollectedFactory>& behaviors);
void register_pagerank(std::vector<BenchEntry>& benches,
                       std::map<std::string, CollectedFactory>& behaviors);
void register_synthetic(std::vector<BenchEntry>& benches,
                        std::map<std::string, CollectedFactory>& behaviors);
}  // namespace detail

}  // namespace weft
