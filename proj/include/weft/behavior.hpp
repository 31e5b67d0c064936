// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <coroutine>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/channel.hpp"
#include "weft/errors.hpp"
#include "weft/graph.hpp"
#include "weft/token.hpp"
#include "weft/trace.hpp"

namespace weft {

/// Why a behavior handed control back to the scheduler. Always names exactly
/// one channel bound to the suspending instance.
struct SuspendReason {
  enum class Kind { WaitNonEmpty, WaitNonFull };
  Kind kind = Kind::WaitNonEmpty;
  ChannelId channel = -1;

  static SuspendReason non_empty(ChannelId c) { return {Kind::WaitNonEmpty, c}; }
  static SuspendReason non_full(ChannelId c) { return {Kind::WaitNonFull, c}; }

  friend bool operator==(const SuspendReason&, const SuspendReason&) = default;
};

/// "non-empty" / "non-full": the condition the instance is waiting for.
std::string_view to_string(SuspendReason::Kind k);

/// Result of one resume slice.
struct StepOutcome {
  enum class Kind { Yielded, Finished };
  Kind kind = Kind::Finished;
  SuspendReason reason;  // meaningful only when Yielded

  static StepOutcome yielded(SuspendReason r) { return {Kind::Yielded, r}; }
  static StepOutcome finished() { return {Kind::Finished, {}}; }
};

class TaskContext;

/// A leaf task's step procedure as an explicitly resumable state machine.
/// Each step() call runs until the behavior must block (return Yielded with
/// the blocking channel; never busy-wait) or completes (return Finished).
/// After a Yield the next step() must continue from the same logical point.
class LeafBehavior {
 public:
  virtual ~LeafBehavior() = default;
  virtual StepOutcome step(TaskContext& ctx) = 0;
};

class InStream;
class OutStream;

/// Per-instance execution environment handed to behaviors: resolved channel
/// endpoints, scalar arguments, and the trace hook.
class TaskContext {
 public:
  struct PortEnd {
    std::string name;
    PortDirection direction = PortDirection::InputStream;
    Channel* channel = nullptr;
  };

  TaskContext(std::string instance_path, std::vector<PortEnd> ports,
              std::vector<ScalarArg> scalars);

  InStream in(std::string_view port);    // throws Error on unknown port
  OutStream out(std::string_view port);  // throws Error on unknown port
  std::uint64_t scalar(std::string_view port) const;
  const std::string& instance_path() const { return path_; }

  // --- scheduler plumbing ---

  void set_pending(SuspendReason r) {
    pending_ = r;
    has_pending_ = true;
  }
  SuspendReason take_pending();

  /// Channels this slice successfully wrote to / read from, in op order.
  /// The scheduler drains these to deliver wakeups.
  const std::vector<ChannelId>& slice_writes() const { return wrote_; }
  const std::vector<ChannelId>& slice_reads() const { return read_; }
  void clear_slice_effects();

  /// Routes op trace events into the owning worker's buffer. counter is the
  /// worker's event step counter; null buf disables tracing.
  void arm_trace(std::vector<TraceEvent>* buf, int worker, std::uint64_t* counter);

 private:
  friend class InStream;
  friend class OutStream;

  Channel* require(std::string_view port, PortDirection dir) const;
  void note_write(ChannelId c) { wrote_.push_back(c); }
  void note_read(ChannelId c) { read_.push_back(c); }
  void log_op(const char* op, const Channel& ch, const Channel::SeqResult& r,
              const std::optional<Token>& tok);

  std::string path_;
  std::vector<PortEnd> ports_;
  std::vector<ScalarArg> scalars_;

  SuspendReason pending_;
  bool has_pending_ = false;
  std::vector<ChannelId> wrote_;
  std::vector<ChannelId> read_;

  std::vector<TraceEvent>* trace_ = nullptr;
  int worker_ = 0;
  std::uint64_t* step_counter_ = nullptr;
};

/// Consumer endpoint of a channel, bound to one instance's input port.
/// try_* never suspend; read()/peek()/eot() are awaitables for coroutine
/// behaviors and block (yield to the scheduler) while the channel is empty.
class InStream {
 public:
  InStream(TaskContext* ctx, Channel* ch) : ctx_(ctx), ch_(ch) {}

  ChannelId id() const { return ch_->id(); }
  const std::string& channel_path() const { return ch_->path(); }
  bool empty() const { return ch_->is_empty(); }
  SuspendReason wait_reason() const { return SuspendReason::non_empty(id()); }

  std::optional<Token> try_read();
  std::optional<Token> try_peek();
  std::optional<bool> try_eot();

  struct ReadAwait;
  struct PeekAwait;
  struct EotAwait;

  /// Blocking destructive read.
  ReadAwait read();
  /// Blocking non-destructive read of the head token.
  PeekAwait peek();
  /// Blocking non-destructive end-of-transaction test.
  EotAwait eot();

 private:
  friend struct ReadAwait;
  friend struct PeekAwait;
  friend struct EotAwait;
  TaskContext* ctx_;
  Channel* ch_;
};

struct InStream::ReadAwait {
  InStream s;
  std::optional<Token> got;
  bool await_ready() {
    got = s.try_read();
    return got.has_value();
  }
  void await_suspend(std::coroutine_handle<>) { s.ctx_->set_pending(s.wait_reason()); }
  Token await_resume();
};

struct InStream::PeekAwait {
  InStream s;
  std::optional<Token> got;
  bool await_ready() {
    got = s.try_peek();
    return got.has_value();
  }
  void await_suspend(std::coroutine_handle<>) { s.ctx_->set_pending(s.wait_reason()); }
  Token await_resume();
};

struct InStream::EotAwait {
  InStream s;
  std::optional<bool> got;
  bool await_ready() {
    got = s.try_eot();
    return got.has_value();
  }
  void await_suspend(std::coroutine_handle<>) { s.ctx_->set_pending(s.wait_reason()); }
  bool await_resume();
};

inline InStream::ReadAwait InStream::read() { return {*this, {}}; }
inline InStream::PeekAwait InStream::peek() { return {*this, {}}; }
inline InStream::EotAwait InStream::eot() { return {*this, {}}; }

/// Producer endpoint of a channel, bound to one instance's output port.
class OutStream {
 public:
  OutStream(TaskContext* ctx, Channel* ch) : ctx_(ctx), ch_(ch) {}

  ChannelId id() const { return ch_->id(); }
  const std::string& channel_path() const { return ch_->path(); }
  bool full() const { return ch_->is_full(); }
  SuspendReason wait_reason() const { return SuspendReason::non_full(id()); }

  bool try_write(const Token& t);
  bool try_close() { return try_write(Token::eot()); }

  struct WriteAwait;

  /// Blocking write.
  WriteAwait write(Token t);
  /// Blocking end-of-transaction write.
  WriteAwait close();

 private:
  friend struct WriteAwait;
  TaskContext* ctx_;
  Channel* ch_;
};

struct OutStream::WriteAwait {
  OutStream s;
  Token t;
  bool done = false;
  bool await_ready() {
    done = s.try_write(t);
    return done;
  }
  void await_suspend(std::coroutine_handle<>) { s.ctx_->set_pending(s.wait_reason()); }
  void await_resume();
};

inline OutStream::WriteAwait OutStream::write(Token t) { return {*this, t}; }
inline OutStream::WriteAwait OutStream::close() { return {*this, Token::eot()}; }

/// Coroutine handle type for behaviors written with co_await. The coroutine
/// starts suspended (nothing runs at instantiation) and every blocked channel
/// access suspends it with an accurate reason, matching the LeafBehavior
/// contract exactly.
class BehaviorCoro {
 public:
  struct promise_type {
    std::exception_ptr error;

    BehaviorCoro get_return_object() {
      return BehaviorCoro(Handle::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { error = std::current_exception(); }
  };
  using Handle = std::coroutine_handle<promise_type>;

  BehaviorCoro() = default;
  explicit BehaviorCoro(Handle h) : h_(h) {}
  BehaviorCoro(BehaviorCoro&& other) noexcept : h_(other.h_) { other.h_ = {}; }
  BehaviorCoro& operator=(BehaviorCoro&& other) noexcept;
  ~BehaviorCoro() {
    if (h_) h_.destroy();
  }

  void resume() { h_.resume(); }
  bool done() const { return h_.done(); }
  void rethrow_if_failed() const;

 private:
  Handle h_;
};

/// Adapts a coroutine body to the LeafBehavior interface.
class CoroBehavior final : public LeafBehavior {
 public:
  using Body = std::function<BehaviorCoro(TaskContext&)>;
  explicit CoroBehavior(Body body) : body_(std::move(body)) {}

  StepOutcome step(TaskContext& ctx) override;

 private:
  Body body_;
  std::optional<BehaviorCoro> coro_;
};

/// Wraps a coroutine body as a definition's behavior factory.
BehaviorFactory coro_behavior(CoroBehavior::Body body);

}  // namespace weft
