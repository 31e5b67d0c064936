// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/trace.hpp"

#include <charconv>

namespace weft {

std::string_view to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::Resume: return "resume";
    case TraceEvent::Kind::Suspend: return "suspend";
    case TraceEvent::Kind::Finish: return "finish";
    case TraceEvent::Kind::Op: return "op";
  }
  return "?";
}

std::string render_trace_line(const TraceEvent& e) {
  std::string out = "step=" + std::to_string(e.step);
  out += " worker=" + std::to_string(e.worker);
  out += " inst=" + e.instance;
  out += " kind=";
  out += to_string(e.kind);
  out += " detail=" + (e.detail.empty() ? std::string("-") : e.detail);
  return out;
}

namespace {

// Grabs the value of "key=" at the current position; value runs to the next
// " key2=" boundary or end of line. detail= consumes the rest of the line.
bool take_field(std::string_view& rest, std::string_view key, std::string_view& out) {
  if (rest.substr(0, key.size()) != key) return false;
  rest.remove_prefix(key.size());
  if (rest.empty() || rest.front() != '=') return false;
  rest.remove_prefix(1);
  std::size_t end = rest.find(' ');
  if (end == std::string_view::npos) {
    out = rest;
    rest = {};
  } else {
    out = rest.substr(0, end);
    rest.remove_prefix(end + 1);
  }
  return true;
}

}  // namespace

std::optional<TraceEvent> parse_trace_line(std::string_view line) {
  TraceEvent e;
  std::string_view rest = line;
  std::string_view step, worker, inst, kind;
  if (!take_field(rest, "step", step)) return std::nullopt;
  if (!take_field(rest, "worker", worker)) return std::nullopt;
  if (!take_field(rest, "inst", inst)) return std::nullopt;
  if (!take_field(rest, "kind", kind)) return std::nullopt;
  if (rest.substr(0, 7) != "detail=") return std::nullopt;
  rest.remove_prefix(7);

  auto [p1, ec1] = std::from_chars(step.data(), step.data() + step.size(), e.step);
  if (ec1 != std::errc() || p1 != step.data() + step.size()) return std::nullopt;
  auto [p2, ec2] =
      std::from_chars(worker.data(), worker.data() + worker.size(), e.worker);
  if (ec2 != std::errc() || p2 != worker.data() + worker.size()) return std::nullopt;
  e.instance = std::string(inst);
  if (kind == "resume") {
    e.kind = TraceEvent::Kind::Resume;
  } else if (kind == "suspend") {
    e.kind = TraceEvent::Kind::Suspend;
  } else if (kind == "finish") {
    e.kind = TraceEvent::Kind::Finish;
  } else if (kind == "op") {
    e.kind = TraceEvent::Kind::Op;
  } else {
    return std::nullopt;
  }
  e.detail = rest == "-" ? std::string() : std::string(rest);
  return e;
}

std::string render_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += render_trace_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace weft
