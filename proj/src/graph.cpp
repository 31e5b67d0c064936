// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace weft {

std::string_view to_string(PortDirection d) {
  switch (d) {
    case PortDirection::InputStream: return "input-stream";
    case PortDirection::OutputStream: return "output-stream";
    case PortDirection::Scalar: return "scalar";
  }
  return "?";
}

const PortDecl* TaskDefinition::find_port(std::string_view name) const {
  for (const auto& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

void ProgramGraph::add_token_type(TokenType t) {
  if (find_token_type(t.name))
    throw DuplicateNameError("token type already defined: " + t.name);
  token_types_.push_back(std::move(t));
}

void ProgramGraph::add_definition(TaskDefinition def) {
  if (find_definition(def.name))
    throw DuplicateNameError("definition already defined: " + def.name);
  definitions_.push_back(std::move(def));
}

void ProgramGraph::attach_behavior(std::string_view definition,
                                   BehaviorFactory factory) {
  for (auto& d : definitions_) {
    if (d.name != definition) continue;
    if (d.kind != TaskKind::Leaf)
      throw Error("cannot attach a behavior to parent definition: " + d.name);
    d.behavior = std::move(factory);
    return;
  }
  throw Error("cannot attach a behavior to unknown definition: " +
              std::string(definition));
}

const TokenType* ProgramGraph::find_token_type(std::string_view name) const {
  for (const auto& t : token_types_)
    if (t.name == name) return &t;
  return nullptr;
}

const TaskDefinition* ProgramGraph::find_definition(std::string_view name) const {
  for (const auto& d : definitions_)
    if (d.name == name) return &d;
  return nullptr;
}

int TaskInstance::channel_for(std::string_view port) const {
  for (const auto& [p, id] : stream_bindings)
    if (p == port) return id;
  return -1;
}

namespace {

class Validator {
 public:
  explicit Validator(const ProgramGraph& g) : g_(g) {}

  ValidationReport run() {
    for (const auto& t : g_.token_types()) {
      if (t.bit_width < 1)
        add(t.name, "token type bit width must be at least 1");
      else if (t.bit_width > 64)
        add(t.name, "token type bit width above 64 is not supported");
    }
    for (const auto& def : g_.definitions()) check_definition(def);
    check_top();
    return std::move(report_);
  }

 private:
  void add(std::string where, std::string message) {
    report_.violations.push_back({std::move(where), std::move(message)});
  }

  void check_definition(const TaskDefinition& def) {
    std::set<std::string> port_names;
    for (const auto& p : def.ports) {
      if (!port_names.insert(p.name).second)
        add(def.name, "duplicate port name: " + p.name);
      if (p.direction == PortDirection::Scalar) {
        if (!p.token_type.empty())
          add(def.name, "scalar port must not name a token type: " + p.name);
      } else if (!g_.find_token_type(p.token_type)) {
        add(def.name, "port " + p.name + " names unknown token type: " + p.token_type);
      }
    }

    if (def.kind == TaskKind::Leaf) {
      if (!def.children.empty())
        add(def.name, "leaf definition has children");
      if (!def.local_channels.empty())
        add(def.name, "leaf definition has local channels");
      return;
    }

    if (def.children.empty()) add(def.name, "parent definition has no children");

    std::set<std::string> channel_names;
    for (const auto& ch : def.local_channels) {
      if (!channel_names.insert(ch.name).second)
        add(def.name, "duplicate channel name: " + ch.name);
      if (port_names.count(ch.name))
        add(def.name, "channel name collides with port name: " + ch.name);
      if (ch.capacity < 1)
        add(def.name + "/" + ch.name, "channel capacity must be at least 1");
      if (!g_.find_token_type(ch.token_type))
        add(def.name + "/" + ch.name, "unknown token type: " + ch.token_type);
    }

    // Endpoint accounting for local channels and parent port forwarding.
    std::map<std::string, int> producers, consumers, forwarded;
    for (const auto& child : def.children) {
      const TaskDefinition* cdef = g_.find_definition(child.definition);
      if (!cdef) {
        add(def.name, "child names unknown definition: " + child.definition);
        continue;
      }
      std::map<std::string, int> bound;
      for (const auto& [port, binding] : child.bindings) {
        const PortDecl* p = cdef->find_port(port);
        if (!p) {
          add(def.name, "binding for unknown port " + child.definition + "." + port);
          continue;
        }
        ++bound[port];
        check_binding(def, *cdef, *p, binding, channel_names, producers, consumers,
                      forwarded);
      }
      for (const auto& p : cdef->ports) {
        int n = bound.count(p.name) ? bound[p.name] : 0;
        if (n == 0)
          add(def.name, "unbound port " + child.definition + "." + p.name);
        else if (n > 1)
          add(def.name, "port " + child.definition + "." + p.name + " bound " +
                            std::to_string(n) + " times");
      }
    }

    for (const auto& ch : def.local_channels) {
      int np = producers.count(ch.name) ? producers[ch.name] : 0;
      int nc = consumers.count(ch.name) ? consumers[ch.name] : 0;
      if (np != 1)
        add(def.name + "/" + ch.name,
            "channel has " + std::to_string(np) + " producers");
      if (nc != 1)
        add(def.name + "/" + ch.name,
            "channel has " + std::to_string(nc) + " consumers");
    }
    for (const auto& p : def.ports) {
      if (p.direction == PortDirection::Scalar) continue;
      int n = forwarded.count(p.name) ? forwarded[p.name] : 0;
      if (n == 0)
        add(def.name, "unbound port " + p.name);
      else if (n > 1)
        add(def.name, "port " + p.name + " forwarded " + std::to_string(n) + " times");
    }
  }

  void check_binding(const TaskDefinition& def, const TaskDefinition& cdef,
                     const PortDecl& port, const Binding& binding,
                     const std::set<std::string>& channel_names,
                     std::map<std::string, int>& producers,
                     std::map<std::string, int>& consumers,
                     std::map<std::string, int>& forwarded) {
    const std::string where = def.name;
    const std::string pname = cdef.name + "." + port.name;
    if (port.direction == PortDirection::Scalar) {
      if (binding.kind == Binding::Kind::Channel) {
        add(where, "scalar port " + pname + " bound to a channel");
      } else if (binding.kind == Binding::Kind::ParentPort) {
        const PortDecl* pp = def.find_port(binding.target);
        if (!pp)
          add(where, pname + " forwards unknown parent port: " + binding.target);
        else if (pp->direction != PortDirection::Scalar)
          add(where, pname + " forwards non-scalar parent port: " + binding.target);
      }
      return;
    }

    switch (binding.kind) {
      case Binding::Kind::Scalar:
        add(where, "stream port " + pname + " bound to a scalar value");
        break;
      case Binding::Kind::Channel: {
        if (!channel_names.count(binding.target)) {
          add(where, pname + " bound to unknown channel: " + binding.target);
          break;
        }
        const ChannelDecl* ch = nullptr;
        for (const auto& c : def.local_channels)
          if (c.name == binding.target) ch = &c;
        if (ch && !port.token_type.empty() && ch->token_type != port.token_type)
          add(where, pname + " token type " + port.token_type +
                         " does not match channel " + ch->name + " of type " +
                         ch->token_type);
        auto& side = port.direction == PortDirection::OutputStream ? producers
                                                                   : consumers;
        ++side[binding.target];
        break;
      }
      case Binding::Kind::ParentPort: {
        const PortDecl* pp = def.find_port(binding.target);
        if (!pp) {
          add(where, pname + " forwards unknown parent port: " + binding.target);
          break;
        }
        if (pp->direction != port.direction) {
          add(where, pname + " direction does not match parent port " +
                         binding.target);
          break;
        }
        if (pp->token_type != port.token_type)
          add(where, pname + " token type does not match parent port " +
                         binding.target);
        ++forwarded[binding.target];
        break;
      }
    }
  }

  void check_top() {
    if (g_.top().empty()) {
      add("", "top not set");
      return;
    }
    const TaskDefinition* top = g_.find_definition(g_.top());
    if (!top) {
      add(g_.top(), "top definition not found");
      return;
    }
    for (const auto& def : g_.definitions()) {
      for (const auto& child : def.children)
        if (child.definition == g_.top())
          add(def.name, "top is instantiated by " + def.name);
    }
    // Reject recursive instantiation among definitions reachable from top.
    std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
    dfs_cycle(*top, state);
  }

  void dfs_cycle(const TaskDefinition& def, std::map<std::string, int>& state) {
    state[def.name] = 1;
    for (const auto& child : def.children) {
      const TaskDefinition* cdef = g_.find_definition(child.definition);
      if (!cdef) continue;  // reported elsewhere
      int s = state.count(cdef->name) ? state[cdef->name] : 0;
      if (s == 1) {
        add(def.name, "recursive instantiation of " + cdef->name);
      } else if (s == 0) {
        dfs_cycle(*cdef, state);
      }
    }
    state[def.name] = 2;
  }

  const ProgramGraph& g_;
  ValidationReport report_;
};

class Elaborator {
 public:
  explicit Elaborator(const ProgramGraph& g) : g_(g) {}

  struct Env {
    std::map<std::string, int> streams;           // parent port -> channel id
    std::map<std::string, std::uint64_t> scalars; // parent port -> value
  };

  FlatGraph run() {
    const TaskDefinition& top = *g_.find_definition(g_.top());
    Env env;
    for (const auto& p : top.ports) {
      if (p.direction == PortDirection::Scalar) {
        env.scalars[p.name] = 0;  // harness-provided; defaults to 0
      } else {
        env.streams[p.name] =
            new_channel(top.name + "/" + p.name, p.token_type,
                        kDefaultChannelCapacity, /*external=*/true);
      }
    }
    elaborate(top, top.name, env);
    return std::move(out_);
  }

 private:
  int new_channel(std::string path, const std::string& token_type, int capacity,
                  bool external) {
    int id = static_cast<int>(out_.channels.size());
    FlatChannel ch;
    ch.id = id;
    ch.path = std::move(path);
    ch.token_type = token_type;
    ch.bit_width = g_.find_token_type(token_type)->bit_width;
    ch.capacity = capacity;
    ch.external = external;
    out_.channels.push_back(std::move(ch));
    return id;
  }

  void elaborate(const TaskDefinition& def, const std::string& path, const Env& env) {
    if (def.kind == TaskKind::Leaf) {
      TaskInstance inst;
      inst.instance_id = static_cast<int>(out_.instances.size());
      inst.definition = def.name;
      inst.path = path;
      for (const auto& p : def.ports) {
        if (p.direction == PortDirection::Scalar) {
          auto it = env.scalars.find(p.name);
          inst.scalars.push_back({p.name, it == env.scalars.end() ? 0 : it->second});
        } else {
          int id = env.streams.at(p.name);
          inst.stream_bindings.emplace_back(p.name, id);
          FlatEndpoint ep{inst.instance_id, p.name};
          if (p.direction == PortDirection::OutputStream)
            out_.channels[id].producer = ep;
          else
            out_.channels[id].consumer = ep;
        }
      }
      out_.instances.push_back(std::move(inst));
      return;
    }

    std::size_t pidx = out_.parents.size();
    out_.parents.push_back({def.name, path, {}});

    std::map<std::string, int> local;
    for (const auto& ch : def.local_channels)
      local[ch.name] =
          new_channel(path + "/" + ch.name, ch.token_type, ch.capacity, false);

    std::map<std::string, int> counts;
    for (const auto& child : def.children) {
      const TaskDefinition& cdef = *g_.find_definition(child.definition);
      int k = counts[child.definition]++;
      std::string cpath = path + "/" + child.definition + "." + std::to_string(k);
      out_.parents[pidx].child_paths.push_back(cpath);

      Env cenv;
      for (const auto& [port, binding] : child.bindings) {
        const PortDecl& p = *cdef.find_port(port);
        switch (binding.kind) {
          case Binding::Kind::Channel:
            cenv.streams[port] = local.at(binding.target);
            break;
          case Binding::Kind::Scalar:
            cenv.scalars[port] = binding.value;
            break;
          case Binding::Kind::ParentPort:
            if (p.direction == PortDirection::Scalar)
              cenv.scalars[port] = env.scalars.at(binding.target);
            else
              cenv.streams[port] = env.streams.at(binding.target);
            break;
        }
      }
      elaborate(cdef, cpath, cenv);
    }
  }

  const ProgramGraph& g_;
  FlatGraph out_;
};

}  // namespace

ValidationReport validate(const ProgramGraph& graph) {
  return Validator(graph).run();
}

FlatGraph flatten(const ProgramGraph& graph) {
  ValidationReport report = validate(graph);
  if (!report.ok()) {
    throw NotValidatedError("graph does not validate: [" +
                            report.violations.front().where + "] " +
                            report.violations.front().message + " (" +
                            std::to_string(report.violations.size()) +
                            " violations total)");
  }
  return Elaborator(graph).run();
}

GraphStats stats(const ProgramGraph& graph) {
  FlatGraph flat = flatten(graph);
  std::set<std::string> defs;
  for (const auto& inst : flat.instances) defs.insert(inst.definition);
  GraphStats s;
  s.num_definitions = static_cast<int>(defs.size());
  s.num_instances = static_cast<int>(flat.instances.size());
  s.num_channels = static_cast<int>(flat.channels.size());
  return s;
}

}  // namespace weft
