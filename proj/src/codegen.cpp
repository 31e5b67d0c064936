// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/codegen.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "weft/sha256.hpp"

namespace weft {

namespace {
using Json = nlohmann::ordered_json;
}  // namespace

const TaskMeta* DesignMetadata::find_task(std::string_view name) const {
  for (const auto& t : tasks)
    if (t.name == name) return &t;
  return nullptr;
}

int DesignMetadata::unique_leaf_definitions() const {
  int n = 0;
  for (const auto& t : tasks)
    if (t.kind == TaskKind::Leaf) ++n;
  return n;
}

int DesignMetadata::total_leaf_instances() const {
  int n = 0;
  for (const auto& t : tasks)
    if (t.kind == TaskKind::Leaf) n += t.instance_count;
  return n;
}

std::string content_hash_of(const TaskMeta& leaf) {
  Sha256 h;
  h.update("task:");
  h.update(leaf.name);
  h.update("\n");
  for (const auto& p : leaf.ports) {
    h.update("port:");
    h.update(p.name);
    h.update(":");
    h.update(to_string(p.direction));
    h.update(":");
    h.update(p.token_type);
    h.update(":");
    h.update(std::to_string(p.bit_width));
    h.update("\n");
  }
  h.update("behavior:");
  h.update(leaf.behavior_fingerprint);
  h.update("\n");
  return h.hex_digest();
}

DesignMetadata extract_metadata(const ProgramGraph& graph) {
  FlatGraph flat = flatten(graph);  // throws NotValidatedError

  DesignMetadata meta;
  meta.top = graph.top();
  const TaskDefinition* top = graph.find_definition(graph.top());
  meta.top_is_leaf = top != nullptr && top->kind == TaskKind::Leaf;

  std::map<std::string, int> counts;
  for (const auto& inst : flat.instances) counts[inst.definition]++;
  for (const auto& par : flat.parents) counts[par.definition]++;

  auto width_of = [&](const std::string& token_type) {
    const TokenType* t = graph.find_token_type(token_type);
    return t == nullptr ? 0 : t->bit_width;
  };

  for (const auto& def : graph.definitions()) {
    TaskMeta t;
    t.name = def.name;
    t.kind = def.kind;
    for (const auto& p : def.ports) {
      int width =
          p.direction == PortDirection::Scalar ? 0 : width_of(p.token_type);
      t.ports.push_back({p.name, p.direction, p.token_type, width});
    }
    if (def.kind == TaskKind::Leaf) t.behavior_fingerprint = def.behavior_key;
    auto it = counts.find(def.name);
    t.instance_count = it == counts.end() ? 0 : it->second;
    if (def.kind == TaskKind::Parent) {
      for (const auto& ch : def.local_channels)
        t.channels.push_back(
            {ch.name, ch.token_type, width_of(ch.token_type), ch.capacity});
      t.children = def.children;
    } else {
      t.content_hash = content_hash_of(t);
    }
    meta.tasks.push_back(std::move(t));
  }

  for (const auto& ch : flat.channels) {
    TopologyRow row;
    row.channel = ch.path;
    row.token_type = ch.token_type;
    row.bit_width = ch.bit_width;
    row.capacity = ch.capacity;
    row.external = ch.external;
    if (!ch.producer.external()) {
      row.producer_instance = flat.instances[ch.producer.instance].path;
      row.producer_port = ch.producer.port;
    }
    if (!ch.consumer.external()) {
      row.consumer_instance = flat.instances[ch.consumer.instance].path;
      row.consumer_port = ch.consumer.port;
    }
    meta.topology.push_back(std::move(row));
  }

  meta.parents = std::move(flat.parents);
  meta.instances = std::move(flat.instances);
  return meta;
}

namespace {

class MockBackend final : public SynthesisBackend {
 public:
  std::string name() const override { return "mock"; }

  std::string synthesize_body(const TaskMeta& leaf) override {
    std::string body;
    body += "  // mock unit " + leaf.name + "\n";
    body += "  // content-hash " + leaf.content_hash + "\n";
    if (!leaf.behavior_fingerprint.empty())
      body += "  // behavior " + leaf.behavior_fingerprint + "\n";
    body += "  assign done = start;\n";
    for (const auto& p : leaf.ports) {
      if (p.direction == PortDirection::InputStream) {
        body += "  assign " + p.name + "_ready = 1'b0;\n";
      } else if (p.direction == PortDirection::OutputStream) {
        body += "  assign " + p.name + "_data = " +
                std::to_string(p.bit_width + 1) + "'d0;\n";
        body += "  assign " + p.name + "_valid = 1'b0;\n";
      }
    }
    return body;
  }
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

class CommandBackend final : public SynthesisBackend {
 public:
  explicit CommandBackend(std::string command) : command_(std::move(command)) {}

  std::string name() const override { return "command"; }

  std::string synthesize_body(const TaskMeta& leaf) override {
    namespace fs = std::filesystem;

    Json doc;
    doc["definition"] = leaf.name;
    doc["content_hash"] = leaf.content_hash;
    doc["behavior"] = leaf.behavior_fingerprint;
    Json ports = Json::array();
    for (const auto& p : leaf.ports) {
      Json jp;
      jp["name"] = p.name;
      jp["direction"] = std::string(to_string(p.direction));
      jp["token_type"] = p.token_type;
      jp["bit_width"] = p.bit_width;
      ports.push_back(std::move(jp));
    }
    doc["ports"] = std::move(ports);

    static std::atomic<unsigned> serial{0};
    fs::path tmp = fs::temp_directory_path() /
                   ("weft-unit-" + std::to_string(::getpid()) + "-" +
                    std::to_string(serial.fetch_add(1)) + ".json");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << doc.dump(2) << '\n';
      if (!out)
        throw IoError("cannot write backend input: " + tmp.string());
    }

    std::string shell = command_ + " < " + shell_quote(tmp.string());
    FILE* pipe = ::popen(shell.c_str(), "r");
    if (pipe == nullptr) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw BackendFailureError("cannot launch backend for " + leaf.name +
                                ": " + command_);
    }
    std::string out;
    char chunk[4096];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, pipe)) > 0)
      out.append(chunk, n);
    int rc = ::pclose(pipe);
    std::error_code ec;
    fs::remove(tmp, ec);

    if (rc == -1)
      throw BackendFailureError("backend wait failed for " + leaf.name);
    if (!WIFEXITED(rc))
      throw BackendFailureError("backend for " + leaf.name +
                                " terminated abnormally");
    if (WEXITSTATUS(rc) != 0)
      throw BackendFailureError("backend for " + leaf.name +
                                " exited with status " +
                                std::to_string(WEXITSTATUS(rc)));
    return out;
  }

 private:
  std::string command_;
};

}  // namespace

std::unique_ptr<SynthesisBackend> make_mock_backend() {
  return std::make_unique<MockBackend>();
}

std::unique_ptr<SynthesisBackend> make_command_backend(std::string command) {
  return std::make_unique<CommandBackend>(std::move(command));
}

std::pair<std::vector<SynthesisResult>, SynthesisStats> synthesize_tasks(
    const DesignMetadata& meta, SynthesisBackend& backend, int jobs) {
  jobs = std::max(1, jobs);

  std::vector<const TaskMeta*> leaves;
  for (const auto& t : meta.tasks)
    if (t.kind == TaskKind::Leaf) leaves.push_back(&t);

  // Group by content hash so each distinct unit is built exactly once. With
  // per-definition hashes the groups are singletons, but hand-built metadata
  // may alias.
  std::vector<const TaskMeta*> unique;
  std::map<std::string, std::size_t> slot_of_hash;
  for (const TaskMeta* leaf : leaves)
    if (slot_of_hash.emplace(leaf->content_hash, unique.size()).second)
      unique.push_back(leaf);

  std::vector<std::string> bodies(unique.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto work = [&]() {
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= unique.size()) return;
      try {
        bodies[i] = backend.synthesize_body(*unique[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  int threads = std::min<int>(jobs, static_cast<int>(unique.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SynthesisResult> results;
  results.reserve(leaves.size());
  for (const TaskMeta* leaf : leaves)
    results.push_back({leaf->name, leaf->content_hash,
                       bodies[slot_of_hash.at(leaf->content_hash)]});
  std::sort(results.begin(), results.end(),
            [](const SynthesisResult& a, const SynthesisResult& b) {
              return a.definition < b.definition;
            });

  SynthesisStats stats;
  stats.unique_units = static_cast<int>(unique.size());
  stats.backend_calls = static_cast<int>(unique.size());
  stats.jobs = jobs;
  stats.wall_slots =
      static_cast<int>((unique.size() + jobs - 1) / static_cast<std::size_t>(jobs));
  return {std::move(results), stats};
}

}  // namespace weft
