// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace weft {

/// Incremental SHA-256 (FIPS 180-4). Used for content hashes and package
/// manifests; small enough that pulling in a crypto library is not worth it.
class Sha256 {
 public:
  Sha256();

  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }

  /// Finishes the hash and returns lowercase hex. The object is spent.
  std::string hex_digest();

 private:
  void compress(const std::uint8_t* block);

  std::uint32_t h_[8];
  std::uint8_t buf_[64];
  std::size_t buf_len_ = 0;
  std::uint64_t total_len_ = 0;
};

/// One-shot convenience.
std::string sha256_hex(std::string_view data);

}  // namespace weft
