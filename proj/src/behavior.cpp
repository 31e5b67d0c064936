// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/behavior.hpp"

namespace weft {

std::string_view to_string(SuspendReason::Kind k) {
  return k == SuspendReason::Kind::WaitNonEmpty ? "non-empty" : "non-full";
}

TaskContext::TaskContext(std::string instance_path, std::vector<PortEnd> ports,
                         std::vector<ScalarArg> scalars)
    : path_(std::move(instance_path)),
      ports_(std::move(ports)),
      scalars_(std::move(scalars)) {}

Channel* TaskContext::require(std::string_view port, PortDirection dir) const {
  for (const auto& p : ports_) {
    if (p.name == port) {
      if (p.direction != dir)
        throw Error("port " + std::string(port) + " of " + path_ + " is " +
                    std::string(to_string(p.direction)) + ", not " +
                    std::string(to_string(dir)));
      return p.channel;
    }
  }
  throw Error("instance " + path_ + " has no port named " + std::string(port));
}

InStream TaskContext::in(std::string_view port) {
  return InStream(this, require(port, PortDirection::InputStream));
}

OutStream TaskContext::out(std::string_view port) {
  return OutStream(this, require(port, PortDirection::OutputStream));
}

std::uint64_t TaskContext::scalar(std::string_view port) const {
  for (const auto& s : scalars_)
    if (s.port == port) return s.value;
  throw Error("instance " + path_ + " has no scalar named " + std::string(port));
}

SuspendReason TaskContext::take_pending() {
  if (!has_pending_)
    throw Error("behavior of " + path_ + " suspended without a reason");
  has_pending_ = false;
  return pending_;
}

void TaskContext::clear_slice_effects() {
  wrote_.clear();
  read_.clear();
}

void TaskContext::arm_trace(std::vector<TraceEvent>* buf, int worker,
                            std::uint64_t* counter) {
  trace_ = buf;
  worker_ = worker;
  step_counter_ = counter;
}

void TaskContext::log_op(const char* op, const Channel& ch,
                         const Channel::SeqResult& r,
                         const std::optional<Token>& tok) {
  if (!trace_) return;
  std::string detail = "op=";
  detail += op;
  detail += " ch=" + ch.path();
  detail += " tok=" + (tok ? render_token(*tok) : std::string("none"));
  detail += " ok=" + std::string(r.ok ? "1" : "0");
  detail += " occ=" + std::to_string(r.occupancy_after);
  detail += " chseq=" + std::to_string(r.seq);
  trace_->push_back(TraceEvent{(*step_counter_)++, worker_, path_,
                               TraceEvent::Kind::Op, std::move(detail)});
}

std::optional<Token> InStream::try_read() {
  auto r = ch_->seq_read();
  ctx_->log_op("read", *ch_, r, r.token);
  if (r.ok) ctx_->note_read(ch_->id());
  return r.token;
}

std::optional<Token> InStream::try_peek() {
  auto r = ch_->seq_peek();
  ctx_->log_op("peek", *ch_, r, r.token);
  return r.token;
}

std::optional<bool> InStream::try_eot() {
  auto r = ch_->seq_eot();
  ctx_->log_op("eot", *ch_, r, r.token);
  if (!r.ok) return std::nullopt;
  return r.token->is_eot;
}

Token InStream::ReadAwait::await_resume() {
  if (!got) {
    got = s.try_read();
    if (!got)
      throw Error("resumed with no readable token on " + s.channel_path());
  }
  return *got;
}

Token InStream::PeekAwait::await_resume() {
  if (!got) {
    got = s.try_peek();
    if (!got)
      throw Error("resumed with no peekable token on " + s.channel_path());
  }
  return *got;
}

bool InStream::EotAwait::await_resume() {
  if (!got) {
    got = s.try_eot();
    if (!got)
      throw Error("resumed with no token to test on " + s.channel_path());
  }
  return *got;
}

bool OutStream::try_write(const Token& t) {
  auto r = ch_->seq_write(t);
  ctx_->log_op(t.is_eot ? "close" : "write", *ch_, r,
               r.ok ? std::optional<Token>(t) : std::nullopt);
  if (r.ok) ctx_->note_write(ch_->id());
  return r.ok;
}

void OutStream::WriteAwait::await_resume() {
  if (!done) {
    if (!s.try_write(t))
      throw Error("resumed with no room to write on " + s.channel_path());
  }
}

BehaviorCoro& BehaviorCoro::operator=(BehaviorCoro&& other) noexcept {
  if (this != &other) {
    if (h_) h_.destroy();
    h_ = other.h_;
    other.h_ = {};
  }
  return *this;
}

void BehaviorCoro::rethrow_if_failed() const {
  if (h_.promise().error) std::rethrow_exception(h_.promise().error);
}

StepOutcome CoroBehavior::step(TaskContext& ctx) {
  if (!coro_) coro_.emplace(body_(ctx));
  coro_->resume();
  if (coro_->done()) {
    coro_->rethrow_if_failed();
    return StepOutcome::finished();
  }
  return StepOutcome::yielded(ctx.take_pending());
}

BehaviorFactory coro_behavior(CoroBehavior::Body body) {
  return [body = std::move(body)]() {
    return std::make_unique<CoroBehavior>(body);
  };
}

}  // namespace weft
