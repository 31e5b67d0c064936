// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "weft/graph.hpp"
#include "weft/scheduler.hpp"

namespace weft {

/// Order-preserving JSON alias: every document we write is key-ordered by
/// construction so equal inputs serialize to equal bytes.
using Json = nlohmann::ordered_json;

/// Graph exchange format. Top-level keys: `token_types`, `definitions`,
/// `top`. Each definition lists `ports`, `channels`, `children` (with
/// explicit per-port bindings) and, for leaves, the `behavior` fingerprint.
Json graph_to_json(const ProgramGraph& graph);

/// Inverse of graph_to_json. Behavior factories cannot ride through a text
/// document, so imported leaves carry only their `behavior` fingerprint;
/// attach factories afterwards (see bench registry) before simulating.
/// Throws IoError on a malformed document.
ProgramGraph graph_from_json(const Json& doc);

Json run_report_to_json(const RunReport& rep);

/// Multi-line human rendering used by the CLI's text output.
std::string render_run_report(const RunReport& rep);

/// Whole-file helpers; throw IoError with the offending path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Parses a JSON document from a file. Throws IoError on read or parse error.
Json read_json_file(const std::filesystem::path& path);

}  // namespace weft
