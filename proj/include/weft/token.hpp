// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <string>

namespace weft {

/// One unit of data moving through a channel. The end-of-transaction marker
/// travels out of band: an EoT token carries no payload.
struct Token {
  std::uint64_t payload = 0;
  bool is_eot = false;

  static Token data(std::uint64_t v) { return Token{v, false}; }
  static Token eot() { return Token{0, true}; }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Stable rendering used by traces and test failure messages.
inline std::string render_token(const Token& t) {
  return t.is_eot ? "eot" : "d:" + std::to_string(t.payload);
}

/// Doubles ride channels as raw bit patterns.
inline std::uint64_t f64_bits(double v) { return std::bit_cast<std::uint64_t>(v); }
inline double bits_f64(std::uint64_t v) { return std::bit_cast<double>(v); }

}  // namespace weft
