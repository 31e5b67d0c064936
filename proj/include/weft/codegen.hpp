// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weft/graph.hpp"

namespace weft {

/// Port description with the token width resolved, as handed to backends.
/// Scalar ports have no token type and report bit_width 0 here; they lower to
/// 64-bit constant inputs in the generated modules.
struct PortMeta {
  std::string name;
  PortDirection direction = PortDirection::InputStream;
  std::string token_type;  // empty for scalars
  int bit_width = 0;       // payload bits; the sideband bit is not counted

  friend bool operator==(const PortMeta&, const PortMeta&) = default;
};

/// A local channel of a parent definition with its width resolved.
struct ChannelMeta {
  std::string name;
  std::string token_type;
  int bit_width = 0;
  int capacity = kDefaultChannelCapacity;

  friend bool operator==(const ChannelMeta&, const ChannelMeta&) = default;
};

/// One task definition as the generator sees it. Leaves carry a content hash
/// and a behavior fingerprint; parents carry their channels and children so
/// the hierarchical wrappers can be rebuilt without re-reading the graph.
struct TaskMeta {
  std::string name;
  TaskKind kind = TaskKind::Leaf;
  std::vector<PortMeta> ports;
  std::string behavior_fingerprint;  // leaf behavior key; may be empty
  int instance_count = 0;            // occurrences in the elaborated design

  // Parent only.
  std::vector<ChannelMeta> channels;
  std::vector<ChildDecl> children;

  // Leaf only: sha256 over name, resolved ports, and the fingerprint.
  std::string content_hash;
};

/// One flattened channel, reduced to what the netlist needs. An empty
/// instance name marks the design boundary (a top-level port).
struct TopologyRow {
  std::string channel;
  std::string token_type;
  int bit_width = 0;
  int capacity = kDefaultChannelCapacity;  // meaningful when internal
  bool external = false;
  std::string producer_instance, producer_port;
  std::string consumer_instance, consumer_port;
};

/// Everything emit and synthesis need, extracted from a validated graph.
struct DesignMetadata {
  std::string top;
  bool top_is_leaf = false;
  std::vector<TaskMeta> tasks;        // every definition, declaration order
  std::vector<TopologyRow> topology;  // flat channels in id order
  std::vector<ParentNode> parents;    // elaborated hierarchy, pre-order
  std::vector<TaskInstance> instances;

  const TaskMeta* find_task(std::string_view name) const;
  int unique_leaf_definitions() const;
  int total_leaf_instances() const;
};

/// Validates, flattens, and distills the graph. Throws NotValidatedError.
DesignMetadata extract_metadata(const ProgramGraph& graph);

/// The digest that keys compile-once memoization. Exposed so tests can pin
/// its ingredients: name, each port as name:direction:token_type:bit_width,
/// and the behavior fingerprint.
std::string content_hash_of(const TaskMeta& leaf);

/// Turns one leaf definition into a module body. Implementations must be
/// deterministic functions of the meta and safe to call from several threads.
class SynthesisBackend {
 public:
  virtual ~SynthesisBackend() = default;
  virtual std::string name() const = 0;
  /// Returns the text between the module header and endmodule.
  /// Throws BackendFailureError when the unit cannot be produced.
  virtual std::string synthesize_body(const TaskMeta& leaf) = 0;
};

/// Built-in backend: a deterministic stub body that records the content hash
/// and port map. Lets the whole flow run without an external toolchain.
std::unique_ptr<SynthesisBackend> make_mock_backend();

/// Pipes a JSON description of the leaf to `command` on stdin and takes its
/// stdout as the module body. A nonzero exit raises BackendFailureError.
std::unique_ptr<SynthesisBackend> make_command_backend(std::string command);

/// One compiled unit, keyed by definition. path-independent: every instance
/// of the definition shares it.
struct SynthesisResult {
  std::string definition;
  std::string content_hash;
  std::string body;
};

struct SynthesisStats {
  int unique_units = 0;
  int backend_calls = 0;
  int jobs = 1;
  // Modeled build latency: synthesis rounds needed with `jobs` parallel
  // workers, i.e. ceil(unique_units / jobs). A flat design that stamped out
  // every instance separately would need ceil(total_instances / jobs).
  int wall_slots = 0;
};

/// Compiles each unique leaf definition exactly once, fanning work across at
/// most `jobs` threads. Results come back sorted by definition name, so the
/// outcome is independent of thread interleaving.
std::pair<std::vector<SynthesisResult>, SynthesisStats> synthesize_tasks(
    const DesignMetadata& meta, SynthesisBackend& backend, int jobs = 1);

struct EmitResult {
  std::map<std::string, std::string> files;  // name -> sha256 of the bytes
  // True when every file already existed on disk with identical bytes, i.e.
  // re-running the generator was a no-op.
  bool unchanged = false;
};

/// Writes the package: one module per unique leaf, one wrapper per parent
/// definition (or a start/done shim when the top itself is a leaf), the FIFO
/// and sequencer primitives when referenced, design.json with the structural
/// netlist, and manifest.json with a digest per file. Deterministic bytes.
/// Throws MissingUnitError when a leaf lacks a synthesis result,
/// WidthMismatchError when a unit port disagrees with its channel, and
/// IoError when the directory cannot be written.
EmitResult emit_design(const DesignMetadata& meta,
                       const std::vector<SynthesisResult>& units,
                       const std::filesystem::path& out_dir);

/// Recomputes every digest listed in <dir>/manifest.json. Returns false on
/// any mismatch or missing file; throws IoError when the manifest itself is
/// absent or unreadable.
bool verify_manifest(const std::filesystem::path& dir);

}  // namespace weft
