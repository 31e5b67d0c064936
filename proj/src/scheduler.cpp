// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_map>
#include <utility>

namespace weft {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::Deadlock: return "deadlock";
    case Outcome::SequentialFailure: return "sequential-failure";
    case Outcome::WatchdogExpired: return "watchdog-expired";
  }
  return "?";
}

/// One leaf instance wired to its channels, plus its scheduling state. All
/// state transitions happen under the scheduler mutex; the behavior itself
/// runs outside it.
struct Simulation::Context {
  enum class State { Ready, Running, Parked, Finished };

  Context(int id_, const TaskInstance* inst_, std::unique_ptr<LeafBehavior> b,
          TaskContext tc)
      : id(id_), inst(inst_), behavior(std::move(b)), task_ctx(std::move(tc)) {}

  int id = 0;
  const TaskInstance* inst = nullptr;
  std::unique_ptr<LeafBehavior> behavior;
  TaskContext task_ctx;

  State state = State::Ready;
  SuspendReason parked_on;
  std::uint64_t resumes = 0;
  int home_worker = 0;  // every resume of this context happens on this worker
};

struct Simulation::Workers {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::deque<int>> ready;  // per-worker FIFO of context ids
  std::size_t ready_count = 0;         // sum of queue sizes
  int running = 0;                     // slices executing outside the lock
  std::size_t finished = 0;
  bool stop = false;
  std::exception_ptr error;
};

Simulation::Simulation(const ProgramGraph& graph, SchedulerConfig config)
    : cfg_(config), top_(graph.top()), flat_(flatten(graph)) {
  if (cfg_.workers < 1) throw Error("workers must be at least 1");

  // External channels are harness-owned staging areas: they hold whatever the
  // harness feeds in before run() and whatever the graph emits, so they are
  // never bounded. Internal channels keep their declared capacity, except in
  // sequential mode, which runs every channel unbounded by design.
  const bool bounded = cfg_.mode == SchedulerConfig::Mode::Coroutine;
  channels_.reserve(flat_.channels.size());
  for (const auto& fc : flat_.channels) {
    std::optional<std::size_t> cap;
    if (bounded && !fc.external) cap = static_cast<std::size_t>(fc.capacity);
    channels_.push_back(std::make_unique<Channel>(fc.id, fc.path, fc.token_type,
                                                  fc.bit_width, cap));
  }

  wake_on_write_.assign(flat_.channels.size(), -1);
  wake_on_read_.assign(flat_.channels.size(), -1);
  for (const auto& fc : flat_.channels) {
    if (!fc.consumer.external()) wake_on_write_[fc.id] = fc.consumer.instance;
    if (!fc.producer.external()) wake_on_read_[fc.id] = fc.producer.instance;
  }

  const int n_workers =
      cfg_.mode == SchedulerConfig::Mode::Coroutine ? cfg_.workers : 1;
  trace_bufs_.resize(static_cast<std::size_t>(n_workers));
  trace_counters_.assign(static_cast<std::size_t>(n_workers), 0);

  contexts_.reserve(flat_.instances.size());
  for (const auto& inst : flat_.instances) {
    const TaskDefinition* def = graph.find_definition(inst.definition);
    if (!def->behavior)
      throw Error("definition " + def->name +
                  " has no behavior attached; cannot simulate");
    std::vector<TaskContext::PortEnd> ends;
    ends.reserve(inst.stream_bindings.size());
    for (const auto& [port, ch] : inst.stream_bindings) {
      const PortDecl* pd = def->find_port(port);
      ends.push_back({port, pd->direction, channels_[ch].get()});
    }
    contexts_.push_back(std::make_unique<Context>(
        inst.instance_id, &inst, def->behavior(),
        TaskContext(inst.path, std::move(ends), inst.scalars)));
  }
}

Simulation::~Simulation() = default;

Channel& Simulation::external_channel(std::string_view top_port) {
  const std::string want = top_ + "/" + std::string(top_port);
  for (const auto& fc : flat_.channels)
    if (fc.external && fc.path == want) return *channels_[fc.id];
  throw Error("top task " + top_ + " has no stream port named " +
              std::string(top_port));
}

std::vector<std::string> Simulation::external_ports() const {
  std::vector<std::string> out;
  const std::string prefix = top_ + "/";
  for (const auto& fc : flat_.channels)
    if (fc.external && fc.path.size() > prefix.size() &&
        fc.path.compare(0, prefix.size(), prefix) == 0)
      out.push_back(fc.path.substr(prefix.size()));
  return out;
}

RunReport Simulation::run() {
  if (ran_) throw Error("Simulation::run is single-use; build a new Simulation");
  ran_ = true;
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep = cfg_.mode == SchedulerConfig::Mode::Sequential
                      ? run_sequential()
                      : run_coroutine();
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

RunReport Simulation::run_coroutine() {
  w_ = std::make_unique<Workers>();
  w_->ready.resize(static_cast<std::size_t>(cfg_.workers));

  // Seeded shuffle of the launch order, then round-robin pinning: with one
  // worker the seed fixes the whole schedule; with several it fixes the
  // assignment but not the interleaving.
  std::vector<int> order(contexts_.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg_.seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Context& c = *contexts_[static_cast<std::size_t>(order[i])];
    c.home_worker = static_cast<int>(i % static_cast<std::size_t>(cfg_.workers));
    c.task_ctx.arm_trace(
        cfg_.trace ? &trace_bufs_[static_cast<std::size_t>(c.home_worker)]
                   : nullptr,
        c.home_worker, &trace_counters_[static_cast<std::size_t>(c.home_worker)]);
    w_->ready[static_cast<std::size_t>(c.home_worker)].push_back(c.id);
  }
  w_->ready_count = order.size();

  if (contexts_.empty()) {
    outcome_ = Outcome::Completed;
  } else if (cfg_.workers == 1) {
    worker_main(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(cfg_.workers));
    for (int w = 0; w < cfg_.workers; ++w)
      pool.emplace_back([this, w] { worker_main(w); });
    for (auto& t : pool) t.join();
  }
  if (w_->error) std::rethrow_exception(w_->error);
  return finish_report(outcome_);
}

void Simulation::worker_main(int worker) {
  std::unique_lock lk(w_->mu);
  auto& q = w_->ready[static_cast<std::size_t>(worker)];
  for (;;) {
    if (w_->stop) return;
    if (!q.empty()) {
      if (steps_ >= cfg_.max_steps) {
        outcome_ = Outcome::WatchdogExpired;
        failure_ = "watchdog: " + std::to_string(cfg_.max_steps) +
                   " resume slices executed without completing";
        w_->stop = true;
        w_->cv.notify_all();
        return;
      }
      Context& c = *contexts_[static_cast<std::size_t>(q.front())];
      q.pop_front();
      --w_->ready_count;
      ++w_->running;
      ++steps_;
      ++c.resumes;
      c.state = Context::State::Running;
      lk.unlock();

      StepOutcome out = StepOutcome::finished();
      std::exception_ptr err;
      try {
        out = execute_slice(c, worker);
      } catch (const BehaviorPanic&) {
        err = std::current_exception();
      } catch (const std::exception& e) {
        err = std::make_exception_ptr(BehaviorPanic(c.inst->path, e.what()));
      } catch (...) {
        err = std::make_exception_ptr(
            BehaviorPanic(c.inst->path, "unknown exception"));
      }

      lk.lock();
      --w_->running;
      if (err) {
        if (!w_->error) w_->error = err;
        w_->stop = true;
        w_->cv.notify_all();
        return;
      }
      deliver_wakes_and_settle(c, out);
      if (w_->finished == contexts_.size()) {
        outcome_ = Outcome::Completed;
        w_->stop = true;
        w_->cv.notify_all();
        return;
      }
      continue;
    }

    // Nothing runnable here. If nothing is runnable anywhere and no slice is
    // in flight, the state can never change again: classify and stop.
    if (w_->running == 0 && w_->ready_count == 0) {
      if (w_->finished == contexts_.size()) {
        outcome_ = Outcome::Completed;
      } else {
        outcome_ = Outcome::Deadlock;
        deadlock_ = walk_deadlock();
      }
      w_->stop = true;
      w_->cv.notify_all();
      return;
    }
    w_->cv.wait(lk);
  }
}

StepOutcome Simulation::execute_slice(Context& c, int worker) {
  std::vector<TraceEvent>* buf =
      cfg_.trace ? &trace_bufs_[static_cast<std::size_t>(worker)] : nullptr;
  std::uint64_t* n = &trace_counters_[static_cast<std::size_t>(worker)];
  if (buf)
    buf->push_back({(*n)++, worker, c.inst->path, TraceEvent::Kind::Resume, ""});
  StepOutcome out = c.behavior->step(c.task_ctx);
  if (buf) {
    if (out.kind == StepOutcome::Kind::Finished) {
      buf->push_back(
          {(*n)++, worker, c.inst->path, TraceEvent::Kind::Finish, ""});
    } else {
      std::string d = "wait=";
      d += to_string(out.reason.kind);
      d += " ch=";
      d += channels_[static_cast<std::size_t>(out.reason.channel)]->path();
      buf->push_back({(*n)++, worker, c.inst->path, TraceEvent::Kind::Suspend,
                      std::move(d)});
    }
  }
  return out;
}

void Simulation::deliver_wakes_and_settle(Context& c, const StepOutcome& out) {
  // Wake the peer endpoint of every channel this slice touched. The woken
  // condition is stable because channels are single-producer single-consumer:
  // only the woken context itself can make the channel empty (resp. full)
  // again, so its retry on resume must succeed.
  auto wake = [&](int target, SuspendReason need) {
    if (target < 0) return;
    Context& t = *contexts_[static_cast<std::size_t>(target)];
    if (t.state == Context::State::Parked && t.parked_on == need) {
      t.state = Context::State::Ready;
      w_->ready[static_cast<std::size_t>(t.home_worker)].push_back(t.id);
      ++w_->ready_count;
      w_->cv.notify_all();
    }
  };
  for (ChannelId ch : c.task_ctx.slice_writes())
    wake(wake_on_write_[static_cast<std::size_t>(ch)],
         SuspendReason::non_empty(ch));
  for (ChannelId ch : c.task_ctx.slice_reads())
    wake(wake_on_read_[static_cast<std::size_t>(ch)],
         SuspendReason::non_full(ch));
  c.task_ctx.clear_slice_effects();

  if (out.kind == StepOutcome::Kind::Finished) {
    c.state = Context::State::Finished;
    ++w_->finished;
    return;
  }

  // Park — unless the wait is already satisfied because the peer acted
  // between our failed try and now. Re-checking here, under the same mutex
  // that delivers wakeups, closes the lost-wakeup window.
  const Channel& ch = *channels_[static_cast<std::size_t>(out.reason.channel)];
  const bool satisfied = out.reason.kind == SuspendReason::Kind::WaitNonEmpty
                             ? !ch.is_empty()
                             : !ch.is_full();
  if (satisfied) {
    c.state = Context::State::Ready;
    w_->ready[static_cast<std::size_t>(c.home_worker)].push_back(c.id);
    ++w_->ready_count;
  } else {
    c.state = Context::State::Parked;
    c.parked_on = out.reason;
  }
}

DeadlockInfo Simulation::walk_deadlock() const {
  DeadlockInfo info;
  const Context* cur = nullptr;
  for (const auto& c : contexts_)
    if (c->state == Context::State::Parked) {
      cur = c.get();
      break;
    }
  if (!cur) {
    info.note = "no parked instance found";
    return info;
  }

  std::unordered_map<int, std::size_t> seen;  // context id -> chain index
  for (;;) {
    seen[cur->id] = info.chain.size();
    const SuspendReason r = cur->parked_on;
    const std::string& ch_path =
        channels_[static_cast<std::size_t>(r.channel)]->path();
    info.chain.push_back({cur->inst->path, ch_path, r.kind});

    const int peer = r.kind == SuspendReason::Kind::WaitNonEmpty
                         ? wake_on_read_[static_cast<std::size_t>(r.channel)]
                         : wake_on_write_[static_cast<std::size_t>(r.channel)];
    if (peer < 0) {
      info.note = cur->inst->path + " waits on the external channel " +
                  ch_path + " and no more input was supplied";
      break;
    }
    const Context& p = *contexts_[static_cast<std::size_t>(peer)];
    if (p.state == Context::State::Finished) {
      info.note = cur->inst->path + " waits on " + ch_path + " but its peer " +
                  p.inst->path + " has already finished";
      break;
    }
    if (p.state != Context::State::Parked) {
      info.note = "wait chain reaches " + p.inst->path +
                  " in an unexpected state";  // defensive; unreachable
      break;
    }
    auto it = seen.find(p.id);
    if (it != seen.end()) {
      info.chain.erase(info.chain.begin(),
                       info.chain.begin() + static_cast<std::ptrdiff_t>(it->second));
      info.is_cycle = true;
      info.note = "cyclic wait among " + std::to_string(info.chain.size()) +
                  " instances";
      break;
    }
    cur = &p;
  }
  return info;
}

RunReport Simulation::run_sequential() {
  std::vector<TraceEvent>* buf = cfg_.trace ? &trace_bufs_[0] : nullptr;
  std::uint64_t* n = &trace_counters_[0];
  Outcome outcome = Outcome::Completed;

  for (auto& cp : contexts_) {
    Context& c = *cp;
    c.task_ctx.arm_trace(buf, 0, n);
    bool moved_on = false;
    while (!moved_on) {
      if (steps_ >= cfg_.max_steps) {
        outcome = Outcome::WatchdogExpired;
        failure_ = "watchdog: " + std::to_string(cfg_.max_steps) +
                   " resume slices executed without completing";
        break;
      }
      ++steps_;
      ++c.resumes;
      c.state = Context::State::Running;
      if (buf)
        buf->push_back(
            {(*n)++, 0, c.inst->path, TraceEvent::Kind::Resume, ""});
      StepOutcome out = StepOutcome::finished();
      try {
        out = c.behavior->step(c.task_ctx);
      } catch (const BehaviorPanic&) {
        throw;
      } catch (const std::exception& e) {
        throw BehaviorPanic(c.inst->path, e.what());
      } catch (...) {
        throw BehaviorPanic(c.inst->path, "unknown exception");
      }
      c.task_ctx.clear_slice_effects();
      if (out.kind == StepOutcome::Kind::Finished) {
        c.state = Context::State::Finished;
        if (buf)
          buf->push_back(
              {(*n)++, 0, c.inst->path, TraceEvent::Kind::Finish, ""});
        moved_on = true;
        continue;
      }

      // One-shot schedule: every earlier instance already ran to completion
      // and no instance ever runs again, so a blocked wait can never be
      // satisfied. This is the documented limit of the sequential baseline.
      const std::string& ch_path =
          channels_[static_cast<std::size_t>(out.reason.channel)]->path();
      if (buf)
        buf->push_back({(*n)++, 0, c.inst->path, TraceEvent::Kind::Suspend,
                        "wait=" + std::string(to_string(out.reason.kind)) +
                            " ch=" + ch_path});
      c.state = Context::State::Parked;
      c.parked_on = out.reason;
      outcome = Outcome::SequentialFailure;
      failure_ = "sequential schedule stuck: " + c.inst->path +
                 " is waiting for " + std::string(to_string(out.reason.kind)) +
                 " on " + ch_path;
      break;
    }
    if (outcome != Outcome::Completed) break;
  }

  outcome_ = outcome;
  return finish_report(outcome);
}

RunReport Simulation::finish_report(Outcome outcome) {
  RunReport rep;
  rep.outcome = outcome;
  rep.steps = steps_;
  rep.workers = cfg_.mode == SchedulerConfig::Mode::Coroutine ? cfg_.workers : 1;
  rep.seed = cfg_.seed;
  rep.failure = failure_;
  rep.deadlock = deadlock_;

  rep.instances.reserve(contexts_.size());
  for (const auto& cp : contexts_) {
    const Context& c = *cp;
    InstanceReport ir;
    ir.instance_id = c.id;
    ir.path = c.inst->path;
    ir.definition = c.inst->definition;
    ir.resumes = c.resumes;
    ir.finished = c.state == Context::State::Finished;
    if (c.state == Context::State::Parked) {
      ir.blocked_channel =
          channels_[static_cast<std::size_t>(c.parked_on.channel)]->path();
      ir.blocked_wait = std::string(to_string(c.parked_on.kind));
    }
    rep.instances.push_back(std::move(ir));
  }

  rep.channels.reserve(flat_.channels.size());
  for (const auto& fc : flat_.channels) {
    const Channel& ch = *channels_[static_cast<std::size_t>(fc.id)];
    ChannelReport cr;
    cr.id = fc.id;
    cr.path = fc.path;
    cr.external = fc.external;
    cr.capacity = ch.capacity();
    cr.stats = ch.stats();
    cr.final_occupancy = ch.occupancy();
    rep.channels.push_back(std::move(cr));
  }

  if (cfg_.trace) {
    std::size_t total = 0;
    for (const auto& b : trace_bufs_) total += b.size();
    rep.trace.reserve(total);
    for (const auto& b : trace_bufs_)
      rep.trace.insert(rep.trace.end(), b.begin(), b.end());
  }
  return rep;
}

RunReport run_graph(const ProgramGraph& graph, SchedulerConfig config) {
  Simulation sim(graph, config);
  return sim.run();
}

}  // namespace weft
