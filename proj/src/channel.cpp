// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/channel.hpp"

namespace weft {

Channel::Channel(ChannelId id, std::string path, std::string token_type,
                 int bit_width, std::optional<std::size_t> capacity)
    : id_(id),
      path_(std::move(path)),
      token_type_(std::move(token_type)),
      bit_width_(bit_width),
      capacity_(capacity) {}

bool Channel::write_locked(const Token& t) {
  if (!t.is_eot && bit_width_ < 64 && (t.payload >> bit_width_) != 0) {
    throw TypeMismatchError("payload " + std::to_string(t.payload) +
                            " does not fit " + std::to_string(bit_width_) +
                            " bits on channel " + path_);
  }
  if (capacity_ && buf_.size() >= *capacity_) return false;
  buf_.push_back(t);
  ++stats_.total_written;
  if (t.is_eot) ++stats_.eot_written;
  stats_.max_occupancy = std::max(stats_.max_occupancy, buf_.size());
  return true;
}

bool Channel::try_write(const Token& t) {
  std::lock_guard lock(mu_);
  ++seq_;
  return write_locked(t);
}

std::optional<Token> Channel::try_read() {
  std::lock_guard lock(mu_);
  ++seq_;
  if (buf_.empty()) return std::nullopt;
  Token t = buf_.front();
  buf_.pop_front();
  ++stats_.total_read;
  if (t.is_eot) ++stats_.eot_read;
  return t;
}

std::optional<Token> Channel::try_peek() const {
  std::lock_guard lock(mu_);
  if (buf_.empty()) return std::nullopt;
  return buf_.front();
}

std::optional<bool> Channel::try_eot() const {
  std::lock_guard lock(mu_);
  if (buf_.empty()) return std::nullopt;
  return buf_.front().is_eot;
}

bool Channel::try_close() { return try_write(Token::eot()); }

bool Channel::is_full() const {
  std::lock_guard lock(mu_);
  return capacity_ && buf_.size() >= *capacity_;
}

bool Channel::is_empty() const {
  std::lock_guard lock(mu_);
  return buf_.empty();
}

std::size_t Channel::occupancy() const {
  std::lock_guard lock(mu_);
  return buf_.size();
}

ChannelStats Channel::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::vector<Token> Channel::snapshot() const {
  std::lock_guard lock(mu_);
  return {buf_.begin(), buf_.end()};
}

Channel::SeqResult Channel::seq_write(const Token& t) {
  std::lock_guard lock(mu_);
  SeqResult r;
  r.seq = ++seq_;
  r.ok = write_locked(t);
  if (r.ok) r.token = t;
  r.occupancy_after = buf_.size();
  return r;
}

Channel::SeqResult Channel::seq_read() {
  std::lock_guard lock(mu_);
  SeqResult r;
  r.seq = ++seq_;
  if (buf_.empty()) return r;
  r.ok = true;
  r.token = buf_.front();
  buf_.pop_front();
  ++stats_.total_read;
  if (r.token->is_eot) ++stats_.eot_read;
  r.occupancy_after = buf_.size();
  return r;
}

Channel::SeqResult Channel::seq_peek() {
  std::lock_guard lock(mu_);
  SeqResult r;
  r.seq = ++seq_;
  if (buf_.empty()) return r;
  r.ok = true;
  r.token = buf_.front();
  r.occupancy_after = buf_.size();
  return r;
}

Channel::SeqResult Channel::seq_eot() {
  std::lock_guard lock(mu_);
  SeqResult r;
  r.seq = ++seq_;
  if (buf_.empty()) return r;
  r.ok = true;
  r.token = buf_.front();
  r.occupancy_after = buf_.size();
  return r;
}

}  // namespace weft
