// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weft {

/// One scheduler or channel event. step indices increase strictly per worker;
/// with one worker the sequence is the global execution order.
struct TraceEvent {
  enum class Kind { Resume, Suspend, Finish, Op };

  std::uint64_t step = 0;
  int worker = 0;
  std::string instance;
  Kind kind = Kind::Resume;
  std::string detail;  // "-" when there is nothing to say

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string_view to_string(TraceEvent::Kind k);

/// "step=<n> worker=<w> inst=<path> kind=<resume|suspend|finish|op> detail=<...>"
std::string render_trace_line(const TraceEvent& e);

/// Inverse of render_trace_line; nullopt on malformed input.
std::optional<TraceEvent> parse_trace_line(std::string_view line);

/// All lines, each terminated with '\n'. Byte-stable for equal inputs.
std::string render_trace(const std::vector<TraceEvent>& events);

}  // namespace weft
