// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "weft/errors.hpp"
#include "weft/token.hpp"

namespace weft {

using ChannelId = int;

struct ChannelStats {
  std::uint64_t total_written = 0;  // data and EoT tokens accepted
  std::uint64_t total_read = 0;
  std::uint64_t eot_written = 0;
  std::uint64_t eot_read = 0;
  std::size_t max_occupancy = 0;
};

/// A bounded FIFO connecting exactly one producer to one consumer. All
/// primitives are non-suspending: a full write or empty read reports
/// would-block instead of waiting; the scheduler layers suspension on top.
///
/// Thread safety: one producer thread and one consumer thread may operate
/// concurrently (the scheduler pins each endpoint to a single worker).
class Channel {
 public:
  Channel(ChannelId id, std::string path, std::string token_type, int bit_width,
          std::optional<std::size_t> capacity);

  ChannelId id() const { return id_; }
  const std::string& path() const { return path_; }
  const std::string& token_type() const { return token_type_; }
  int bit_width() const { return bit_width_; }
  std::optional<std::size_t> capacity() const { return capacity_; }

  /// Appends a token. Returns false when the channel is full (would block).
  /// Throws TypeMismatchError when a data payload does not fit bit_width.
  bool try_write(const Token& t);

  /// Removes and returns the head token; reading an EoT opens the channel for
  /// the next transaction. Empty channel returns nullopt (would block).
  std::optional<Token> try_read();

  /// Returns the head token without removing it. Idempotent.
  std::optional<Token> try_peek() const;

  /// True/false when the head is/is not an EoT; nullopt when empty. A
  /// non-destructive test, like try_peek.
  std::optional<bool> try_eot() const;

  /// Writes the end-of-transaction marker; equivalent to try_write(eot).
  bool try_close();

  bool is_full() const;
  bool is_empty() const;
  std::size_t occupancy() const;

  ChannelStats stats() const;

  /// Buffer contents, head first. For tests (peek purity, conservation).
  std::vector<Token> snapshot() const;

  // Sequenced variants used by the tracing layer: every call, including
  // non-mutating peeks, advances a per-channel sequence number under the
  // channel lock so concurrent traces can be replayed in channel order.
  struct SeqResult {
    std::uint64_t seq = 0;
    bool ok = false;
    std::optional<Token> token;
    std::size_t occupancy_after = 0;
  };
  SeqResult seq_write(const Token& t);
  SeqResult seq_read();
  SeqResult seq_peek();
  SeqResult seq_eot();  // token unset; ok=false means empty, else token holds
                        // a pseudo token whose is_eot is the answer

 private:
  bool write_locked(const Token& t);

  const ChannelId id_;
  const std::string path_;
  const std::string token_type_;
  const int bit_width_;
  const std::optional<std::size_t> capacity_;  // nullopt: unbounded (sequential mode)

  mutable std::mutex mu_;
  std::deque<Token> buf_;
  ChannelStats stats_;
  std::uint64_t seq_ = 0;
};

}  // namespace weft
