// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: environment lookups, scratch directories, CLI
// invocation, a trace-replay validator, and a small JSON-schema-subset
// checker for documents this project commits schemas for.
#pragma once

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "weft/json_io.hpp"
#include "weft/scheduler.hpp"
#include "weft/trace.hpp"

namespace testutil {

inline std::string require_env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "weft-test") {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    for (int tries = 0; tries < 64; ++tries) {
      auto candidate = base / (prefix + "-" + std::to_string(rng()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create a scratch directory");
  }
  ~TempDir() {
    std::error_code ec;
    if (!path_.empty()) std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

/// Runs the built CLI (path from $WEFT_CLI) with the given argument string.
inline CliResult run_cli(const std::string& args) {
  const std::string cli = require_env("WEFT_CLI");
  if (cli.empty()) return {-1, "WEFT_CLI is not set"};
  std::string cmd = cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, std::move(out)};
}

/// Replays every channel op recorded in a trace through a reference queue
/// and checks each outcome (value, success, occupancy) against what a
/// bounded FIFO with out-of-band end-of-transaction must do. Per-channel op
/// sequence numbers give a total order per channel even for multi-worker
/// traces. Returns "" when the trace is a valid interleaving, else the first
/// offense.
struct ReplayOp {
  std::uint64_t chseq = 0;
  std::string kind, tok;
  bool ok = false;
  std::size_t occ = 0;
};

inline std::string replay_issue(const std::vector<weft::TraceEvent>& events,
                                const weft::RunReport& report) {
  using Op = ReplayOp;

  // detail: "op=<k> ch=<path> tok=<t> ok=<0|1> occ=<n> chseq=<n>"
  // Keys must start a word: a bare substring search would find "ok=" inside
  // "tok=".
  auto field = [](const std::string& s, const std::string& key) {
    const std::string needle = key + "=";
    for (auto at = s.find(needle); at != std::string::npos;
         at = s.find(needle, at + 1)) {
      if (at != 0 && s[at - 1] != ' ') continue;
      at += needle.size();
      auto end = s.find(' ', at);
      return s.substr(at, end == std::string::npos ? end : end - at);
    }
    return std::string();
  };

  std::map<std::string, std::vector<Op>> per_channel;
  for (const auto& e : events) {
    if (e.kind != weft::TraceEvent::Kind::Op) continue;
    Op op;
    op.kind = field(e.detail, "op");
    op.tok = field(e.detail, "tok");
    op.ok = field(e.detail, "ok") == "1";
    op.occ = std::stoull(field(e.detail, "occ"));
    op.chseq = std::stoull(field(e.detail, "chseq"));
    per_channel[field(e.detail, "ch")].push_back(op);
  }

  std::map<std::string, std::optional<std::size_t>> capacity;
  for (const auto& c : report.channels) capacity[c.path] = c.capacity;

  for (auto& [path, ops] : per_channel) {
    std::sort(ops.begin(), ops.end(),
              [](const Op& a, const Op& b) { return a.chseq < b.chseq; });
    // Plain bool+value pair instead of an optional: the optimizer's flow
    // analysis trips over the engaged check inside the loop otherwise.
    bool bounded = false;
    std::size_t cap = 0;
    if (auto it = capacity.find(path); it != capacity.end() && it->second) {
      bounded = true;
      cap = *it->second;
    }
    std::vector<std::string> q;  // token renderings, head first
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Op& op = ops[i];
      auto fail = [&](const std::string& why) {
        return path + " op " + std::to_string(i) + " (" + op.kind + "): " + why;
      };
      if (op.chseq != i + 1)
        return fail("channel sequence " + std::to_string(op.chseq) +
                    ", expected " + std::to_string(i + 1));
      if (op.kind == "write" || op.kind == "close") {
        if (op.ok) {
          if (bounded && q.size() >= cap) return fail("write into a full channel");
          q.push_back(op.tok);
        } else if (!bounded || q.size() < cap) {
          return fail("refused write while channel had room");
        }
      } else if (op.kind == "read") {
        if (op.ok) {
          if (q.empty()) return fail("read from an empty channel");
          if (q.front() != op.tok)
            return fail("read " + op.tok + " but head was " + q.front());
          q.erase(q.begin());
        } else if (!q.empty()) {
          return fail("refused read while tokens were available");
        }
      } else if (op.kind == "peek" || op.kind == "eot") {
        if (op.ok) {
          if (q.empty()) return fail("peek on an empty channel");
          if (q.front() != op.tok)
            return fail("peeked " + op.tok + " but head was " + q.front());
        } else if (!q.empty()) {
          return fail("refused peek while tokens were available");
        }
      } else {
        return fail("unknown op kind");
      }
      if (op.occ != q.size())
        return fail("occupancy " + std::to_string(op.occ) + ", replay has " +
                    std::to_string(q.size()));
    }
  }
  return "";
}

/// Validates `doc` against the subset of JSON Schema our committed schemas
/// use: type (single or list), required, properties, items, enum, minimum.
/// Returns "" when valid, else a one-line violation.
inline std::string schema_violation(const weft::Json& schema,
                                    const weft::Json& doc,
                                    const std::string& where = "$") {
  auto type_ok = [&](const std::string& t) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "integer") return doc.is_number_integer();
    if (t == "number") return doc.is_number();
    if (t == "boolean") return doc.is_boolean();
    if (t == "null") return doc.is_null();
    return false;
  };

  if (schema.contains("type")) {
    const auto& ty = schema["type"];
    bool ok = false;
    if (ty.is_string()) {
      ok = type_ok(ty.get<std::string>());
    } else {
      for (const auto& t : ty)
        if (type_ok(t.get<std::string>())) ok = true;
    }
    if (!ok) return where + ": wrong type";
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& v : schema["enum"])
      if (v == doc) ok = true;
    if (!ok) return where + ": value not in enum";
  }
  if (doc.is_number() && schema.contains("minimum") &&
      doc.get<double>() < schema["minimum"].get<double>())
    return where + ": below minimum";
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          return where + ": missing required key " + key.get<std::string>();
    if (schema.contains("properties"))
      for (auto it = schema["properties"].begin();
           it != schema["properties"].end(); ++it)
        if (doc.contains(it.key()))
          if (auto v = schema_violation(it.value(), doc[it.key()],
                                        where + "." + it.key());
              !v.empty())
            return v;
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      if (auto v = schema_violation(schema["items"], doc[i],
                                    where + "[" + std::to_string(i) + "]");
          !v.empty())
        return v;
  }
  return "";
}

inline std::vector<weft::TraceEvent> parse_trace_text(const std::string& text) {
  std::vector<weft::TraceEvent> events;
  std::size_t at = 0;
  while (at < text.size()) {
    auto end = text.find('\n', at);
    if (end == std::string::npos) end = text.size();
    auto line = text.substr(at, end - at);
    if (!line.empty()) {
      auto e = weft::parse_trace_line(line);
      if (e) events.push_back(*e);
    }
    at = end + 1;
  }
  return events;
}

}  // namespace testutil
