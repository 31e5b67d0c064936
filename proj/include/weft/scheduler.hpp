// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/behavior.hpp"
#include "weft/channel.hpp"
#include "weft/graph.hpp"
#include "weft/trace.hpp"

namespace weft {

/// Watchdog default: abort runs that execute this many resume slices.
inline constexpr std::uint64_t kDefaultMaxSteps = 100'000'000;

struct SchedulerConfig {
  enum class Mode {
    Coroutine,   // every leaf is an independently suspendable context
    Sequential,  // leaves run to completion one after another, in flatten
                 // order, over unbounded channels
  };

  Mode mode = Mode::Coroutine;
  int workers = 1;                           // Coroutine mode only
  std::uint64_t seed = 0;                    // shuffles the initial ready order
  std::uint64_t max_steps = kDefaultMaxSteps;
  bool trace = false;
};

enum class Outcome {
  Completed,          // every leaf instance finished
  Deadlock,           // no instance can make progress; see DeadlockInfo
  SequentialFailure,  // sequential mode: a leaf needed a token its one-shot
                      // schedule can never deliver
  WatchdogExpired,    // max_steps resume slices executed without finishing
};

std::string_view to_string(Outcome o);

struct InstanceReport {
  int instance_id = 0;
  std::string path;
  std::string definition;
  std::uint64_t resumes = 0;       // slices this instance executed
  bool finished = false;
  std::string blocked_channel;     // set when the run ended with this
  std::string blocked_wait;        // instance parked: channel path and
                                   // "non-empty" / "non-full"
};

struct ChannelReport {
  int id = 0;
  std::string path;
  bool external = false;
  std::optional<std::size_t> capacity;  // unset when run unbounded
  ChannelStats stats;
  std::size_t final_occupancy = 0;
};

/// Explains a deadlock as the wait chain discovered by following each parked
/// instance to the peer endpoint of the channel it waits on.
struct DeadlockInfo {
  struct Link {
    std::string instance;  // who waits
    std::string channel;   // on which channel
    SuspendReason::Kind waiting_for = SuspendReason::Kind::WaitNonEmpty;
  };

  std::vector<Link> chain;
  bool is_cycle = false;  // true: the chain loops back on its first link
  std::string note;       // cycle summary, or why the chain ends (peer
                          // finished / external boundary)
};

struct RunReport {
  Outcome outcome = Outcome::Completed;
  std::uint64_t steps = 0;  // resume slices executed across all instances
  int workers = 1;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;

  std::vector<InstanceReport> instances;
  std::vector<ChannelReport> channels;
  std::optional<DeadlockInfo> deadlock;  // set when outcome == Deadlock
  std::string failure;                   // human-readable cause for
                                         // SequentialFailure / WatchdogExpired

  std::vector<TraceEvent> trace;  // populated when SchedulerConfig::trace
};

/// One elaborated program wired up and ready to run: channels allocated,
/// a behavior object created per leaf instance, nothing executed yet.
///
/// External boundary: every stream port of the top task becomes an unbounded
/// channel owned by the simulation. Feed inputs (and close them) through
/// external_channel() before run(); drain outputs from it afterwards.
class Simulation {
 public:
  Simulation(const ProgramGraph& graph, SchedulerConfig config = {});
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const FlatGraph& flat() const { return flat_; }
  std::size_t context_count() const { return contexts_.size(); }

  /// The harness-side channel backing a stream port of the top task.
  /// Throws Error when the top has no such port.
  Channel& external_channel(std::string_view top_port);
  std::vector<std::string> external_ports() const;

  /// Runs to completion, deadlock, or watchdog. Single use: a second call
  /// throws Error. Behavior exceptions propagate after workers stop.
  RunReport run();

 private:
  struct Context;

  RunReport run_coroutine();
  RunReport run_sequential();
  void worker_main(int worker);
  StepOutcome execute_slice(Context& c, int worker);
  void deliver_wakes_and_settle(Context& c, const StepOutcome& out);
  DeadlockInfo walk_deadlock() const;
  RunReport finish_report(Outcome outcome);

  SchedulerConfig cfg_;
  std::string top_;
  FlatGraph flat_;
  std::vector<std::unique_ptr<Channel>> channels_;
  std::vector<std::unique_ptr<Context>> contexts_;
  std::vector<int> wake_on_write_;  // channel id -> consumer context (-1: none)
  std::vector<int> wake_on_read_;   // channel id -> producer context (-1: none)

  struct Workers;  // locking state shared by the worker threads
  std::unique_ptr<Workers> w_;

  std::vector<std::vector<TraceEvent>> trace_bufs_;  // one per worker
  std::vector<std::uint64_t> trace_counters_;
  bool ran_ = false;
  Outcome outcome_ = Outcome::Completed;
  std::string failure_;
  std::optional<DeadlockInfo> deadlock_;
  std::uint64_t steps_ = 0;
  double wall_ms_ = 0.0;
};

/// Builds a Simulation and runs it once.
RunReport run_graph(const ProgramGraph& graph, SchedulerConfig config = {});

}  // namespace weft
