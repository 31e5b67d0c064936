// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "weft/errors.hpp"

namespace weft {

class LeafBehavior;

/// Default bounded-channel capacity when a declaration does not pick one.
inline constexpr int kDefaultChannelCapacity = 2;

/// Named payload type. bit_width covers the payload only; the
/// end-of-transaction marker is a sideband bit and is not counted here.
struct TokenType {
  std::string name;
  int bit_width = 1;

  friend bool operator==(const TokenType&, const TokenType&) = default;
};

enum class PortDirection { InputStream, OutputStream, Scalar };

std::string_view to_string(PortDirection d);

/// A port on a task definition. Stream ports name a token type; scalar ports
/// carry a 64-bit constant fixed at instantiation and have no token type.
struct PortDecl {
  std::string name;
  PortDirection direction = PortDirection::InputStream;
  std::string token_type;

  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

/// A bounded FIFO declared inside a parent task.
struct ChannelDecl {
  std::string name;
  std::string token_type;
  int capacity = kDefaultChannelCapacity;

  friend bool operator==(const ChannelDecl&, const ChannelDecl&) = default;
};

/// How a child port is connected at instantiation.
struct Binding {
  enum class Kind { Channel, ParentPort, Scalar };
  Kind kind = Kind::Channel;
  std::string target;        // channel or parent port name
  std::uint64_t value = 0;   // scalar literal

  static Binding channel(std::string name) {
    return {Kind::Channel, std::move(name), 0};
  }
  static Binding parent_port(std::string name) {
    return {Kind::ParentPort, std::move(name), 0};
  }
  static Binding scalar(std::uint64_t v) { return {Kind::Scalar, "", v}; }

  friend bool operator==(const Binding&, const Binding&) = default;
};

/// A child instantiation inside a parent definition.
struct ChildDecl {
  std::string definition;
  std::vector<std::pair<std::string, Binding>> bindings;  // port -> binding

  friend bool operator==(const ChildDecl&, const ChildDecl&) = default;
};

enum class TaskKind { Leaf, Parent };

/// Creates a fresh behavior object for one leaf instance. All per-instance
/// variation must come through scalar ports and channel bindings; the factory
/// itself is shared by every instance of the definition.
using BehaviorFactory = std::function<std::unique_ptr<LeafBehavior>()>;

struct TaskDefinition {
  std::string name;
  TaskKind kind = TaskKind::Leaf;
  std::vector<PortDecl> ports;

  // Leaf only. behavior may be empty for structural-only graphs (imported
  // files, codegen inputs); behavior_key identifies the step procedure for
  // content hashing and for re-attachment after import.
  BehaviorFactory behavior;
  std::string behavior_key;

  // Parent only.
  std::vector<ChannelDecl> local_channels;
  std::vector<ChildDecl> children;

  const PortDecl* find_port(std::string_view name) const;
};

/// A whole program: token types, task definitions, and the designated top.
class ProgramGraph {
 public:
  void add_token_type(TokenType t);          // throws DuplicateNameError
  void add_definition(TaskDefinition def);   // throws DuplicateNameError
  void set_top(std::string name) { top_ = std::move(name); }

  /// Binds a behavior factory to an existing leaf definition — how imported
  /// structural graphs become runnable. Throws Error when the definition is
  /// missing or not a leaf.
  void attach_behavior(std::string_view definition, BehaviorFactory factory);

  const std::string& top() const { return top_; }
  const std::vector<TokenType>& token_types() const { return token_types_; }
  const std::vector<TaskDefinition>& definitions() const { return definitions_; }

  const TokenType* find_token_type(std::string_view name) const;
  const TaskDefinition* find_definition(std::string_view name) const;

 private:
  std::vector<TokenType> token_types_;
  std::vector<TaskDefinition> definitions_;
  std::string top_;
};

/// One broken rule found by validate(). Violations are data, not exceptions.
struct Violation {
  std::string where;    // definition or channel the rule applies to
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural rule: names resolve, the definition graph is
/// acyclic with a unique top, ports are bound once with matching directions,
/// and every local channel has exactly one producer and one consumer.
ValidationReport validate(const ProgramGraph& graph);

/// A resolved scalar argument on a flattened instance.
struct ScalarArg {
  std::string port;
  std::uint64_t value = 0;

  friend bool operator==(const ScalarArg&, const ScalarArg&) = default;
};

/// Endpoint of a flattened channel: a leaf instance port, or the external
/// boundary when instance == kExternal (top-level ports are modeled as
/// harness-owned channels).
struct FlatEndpoint {
  static constexpr int kExternal = -1;
  int instance = kExternal;
  std::string port;

  bool external() const { return instance == kExternal; }

  friend bool operator==(const FlatEndpoint&, const FlatEndpoint&) = default;
};

struct FlatChannel {
  int id = 0;
  std::string path;         // hierarchical name, '/'-joined
  std::string token_type;
  int bit_width = 0;
  int capacity = kDefaultChannelCapacity;
  bool external = false;
  FlatEndpoint producer;
  FlatEndpoint consumer;

  friend bool operator==(const FlatChannel&, const FlatChannel&) = default;
};

/// A flattened leaf instance. Instances are named <definition>.<k> where k
/// counts instantiations of that definition within the parent, and paths join
/// segments with '/'.
struct TaskInstance {
  int instance_id = 0;
  std::string definition;
  std::string path;
  std::vector<std::pair<std::string, int>> stream_bindings;  // port -> channel id
  std::vector<ScalarArg> scalars;

  int channel_for(std::string_view port) const;  // -1 if unbound

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

/// A parent occurrence in the elaborated hierarchy; drives one control FSM.
struct ParentNode {
  std::string definition;
  std::string path;
  std::vector<std::string> child_paths;  // leaf or parent paths, declaration order

  friend bool operator==(const ParentNode&, const ParentNode&) = default;
};

struct FlatGraph {
  std::vector<TaskInstance> instances;  // leaves in depth-first pre-order
  std::vector<FlatChannel> channels;
  std::vector<ParentNode> parents;      // pre-order; the top parent first
};

/// Depth-first elaboration with pass-through splicing. Deterministic: equal
/// graphs flatten to equal results. Throws NotValidatedError when validate()
/// reports violations.
FlatGraph flatten(const ProgramGraph& graph);

struct GraphStats {
  int num_definitions = 0;  // unique leaf definitions instantiated
  int num_instances = 0;    // leaf instances
  int num_channels = 0;     // flattened channels, external boundary included

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// Summary counts of the flattened graph. Throws NotValidatedError.
GraphStats stats(const ProgramGraph& graph);

}  // namespace weft
