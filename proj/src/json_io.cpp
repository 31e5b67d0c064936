// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#include "weft/json_io.hpp"

#include <fstream>
#include <sstream>

#include "weft/errors.hpp"

namespace weft {

namespace {

PortDirection direction_from_string(const std::string& s) {
  if (s == "input-stream") return PortDirection::InputStream;
  if (s == "output-stream") return PortDirection::OutputStream;
  if (s == "scalar") return PortDirection::Scalar;
  throw IoError("unknown port direction \"" + s + "\"");
}

Json binding_to_json(const Binding& b) {
  switch (b.kind) {
    case Binding::Kind::Channel:
      return Json{{"channel", b.target}};
    case Binding::Kind::ParentPort:
      return Json{{"parent_port", b.target}};
    case Binding::Kind::Scalar:
      return Json{{"scalar", b.value}};
  }
  throw IoError("unencodable binding");
}

Binding binding_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1)
    throw IoError("binding must be a single-key object");
  if (j.contains("channel")) return Binding::channel(j.at("channel").get<std::string>());
  if (j.contains("parent_port"))
    return Binding::parent_port(j.at("parent_port").get<std::string>());
  if (j.contains("scalar")) return Binding::scalar(j.at("scalar").get<std::uint64_t>());
  throw IoError("binding key must be channel, parent_port, or scalar");
}

}  // namespace

Json graph_to_json(const ProgramGraph& graph) {
  Json doc;
  doc["token_types"] = Json::array();
  for (const auto& t : graph.token_types())
    doc["token_types"].push_back({{"name", t.name}, {"bit_width", t.bit_width}});

  doc["definitions"] = Json::array();
  for (const auto& def : graph.definitions()) {
    Json d;
    d["name"] = def.name;
    d["kind"] = def.kind == TaskKind::Leaf ? "leaf" : "parent";
    d["ports"] = Json::array();
    for (const auto& p : def.ports) {
      Json pj{{"name", p.name}, {"direction", std::string(to_string(p.direction))}};
      if (p.direction != PortDirection::Scalar) pj["token_type"] = p.token_type;
      d["ports"].push_back(std::move(pj));
    }
    if (def.kind == TaskKind::Leaf) {
      if (!def.behavior_key.empty()) d["behavior"] = def.behavior_key;
    } else {
      d["channels"] = Json::array();
      for (const auto& ch : def.local_channels)
        d["channels"].push_back({{"name", ch.name},
                                 {"token_type", ch.token_type},
                                 {"capacity", ch.capacity}});
      d["children"] = Json::array();
      for (const auto& c : def.children) {
        Json cj;
        cj["definition"] = c.definition;
        Json bindings = Json::object();
        for (const auto& [port, b] : c.bindings) bindings[port] = binding_to_json(b);
        cj["bindings"] = std::move(bindings);
        d["children"].push_back(std::move(cj));
      }
    }
    doc["definitions"].push_back(std::move(d));
  }
  doc["top"] = graph.top();
  return doc;
}

ProgramGraph graph_from_json(const Json& doc) {
  try {
    ProgramGraph g;
    for (const auto& tj : doc.at("token_types")) {
      TokenType t;
      t.name = tj.at("name").get<std::string>();
      t.bit_width = tj.at("bit_width").get<int>();
      g.add_token_type(std::move(t));
    }
    for (const auto& dj : doc.at("definitions")) {
      TaskDefinition def;
      def.name = dj.at("name").get<std::string>();
      const std::string kind = dj.at("kind").get<std::string>();
      if (kind == "leaf")
        def.kind = TaskKind::Leaf;
      else if (kind == "parent")
        def.kind = TaskKind::Parent;
      else
        throw IoError("unknown task kind \"" + kind + "\"");
      for (const auto& pj : dj.at("ports")) {
        PortDecl p;
        p.name = pj.at("name").get<std::string>();
        p.direction = direction_from_string(pj.at("direction").get<std::string>());
        if (p.direction != PortDirection::Scalar)
          p.token_type = pj.at("token_type").get<std::string>();
        def.ports.push_back(std::move(p));
      }
      if (def.kind == TaskKind::Leaf) {
        if (dj.contains("behavior"))
          def.behavior_key = dj.at("behavior").get<std::string>();
      } else {
        for (const auto& cj : dj.value("channels", Json::array())) {
          ChannelDecl ch;
          ch.name = cj.at("name").get<std::string>();
          ch.token_type = cj.at("token_type").get<std::string>();
          ch.capacity = cj.at("capacity").get<int>();
          def.local_channels.push_back(std::move(ch));
        }
        for (const auto& cj : dj.value("children", Json::array())) {
          ChildDecl c;
          c.definition = cj.at("definition").get<std::string>();
          for (const auto& [port, bj] : cj.at("bindings").items())
            c.bindings.emplace_back(port, binding_from_json(bj));
          def.children.push_back(std::move(c));
        }
      }
      g.add_definition(std::move(def));
    }
    g.set_top(doc.at("top").get<std::string>());
    return g;
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed graph document: ") + e.what());
  }
}

Json run_report_to_json(const RunReport& rep) {
  Json doc;
  doc["outcome"] = std::string(to_string(rep.outcome));
  doc["steps"] = rep.steps;
  doc["workers"] = rep.workers;
  doc["seed"] = rep.seed;
  // Wall-clock time is measurement noise, deliberately not serialized: equal
  // runs must produce equal documents.
  doc["failure"] = rep.failure;

  doc["instances"] = Json::array();
  for (const auto& i : rep.instances) {
    Json ij;
    ij["instance_id"] = i.instance_id;
    ij["path"] = i.path;
    ij["definition"] = i.definition;
    ij["resumes"] = i.resumes;
    ij["finished"] = i.finished;
    if (!i.blocked_channel.empty()) {
      ij["blocked_channel"] = i.blocked_channel;
      ij["blocked_wait"] = i.blocked_wait;
    }
    doc["instances"].push_back(std::move(ij));
  }

  doc["channels"] = Json::array();
  for (const auto& c : rep.channels) {
    Json cj;
    cj["id"] = c.id;
    cj["path"] = c.path;
    cj["external"] = c.external;
    if (c.capacity)
      cj["capacity"] = *c.capacity;
    else
      cj["capacity"] = nullptr;
    cj["total_written"] = c.stats.total_written;
    cj["total_read"] = c.stats.total_read;
    cj["eot_written"] = c.stats.eot_written;
    cj["eot_read"] = c.stats.eot_read;
    cj["max_occupancy"] = c.stats.max_occupancy;
    cj["final_occupancy"] = c.final_occupancy;
    doc["channels"].push_back(std::move(cj));
  }

  if (rep.deadlock) {
    Json dj;
    dj["is_cycle"] = rep.deadlock->is_cycle;
    dj["note"] = rep.deadlock->note;
    dj["chain"] = Json::array();
    for (const auto& link : rep.deadlock->chain)
      dj["chain"].push_back({{"instance", link.instance},
                             {"channel", link.channel},
                             {"waiting_for", std::string(to_string(link.waiting_for))}});
    doc["deadlock"] = std::move(dj);
  }
  return doc;
}

std::string render_run_report(const RunReport& rep) {
  std::ostringstream out;
  out << "outcome: " << to_string(rep.outcome) << "\n";
  out << "steps: " << rep.steps << "  workers: " << rep.workers
      << "  seed: " << rep.seed << "\n";
  if (!rep.failure.empty()) out << "failure: " << rep.failure << "\n";
  if (rep.deadlock) {
    out << "deadlock (" << (rep.deadlock->is_cycle ? "cycle" : "chain")
        << "): " << rep.deadlock->note << "\n";
    for (const auto& link : rep.deadlock->chain)
      out << "  " << link.instance << " waits for " << to_string(link.waiting_for)
          << " on " << link.channel << "\n";
  }
  std::uint64_t unfinished = 0;
  for (const auto& i : rep.instances)
    if (!i.finished) ++unfinished;
  out << "instances: " << rep.instances.size() << " (" << unfinished
      << " unfinished)\n";
  out << "channels:\n";
  for (const auto& c : rep.channels) {
    out << "  " << c.path << ": written=" << c.stats.total_written
        << " read=" << c.stats.total_read << " eot=" << c.stats.eot_written << "/"
        << c.stats.eot_read << " max_occ=" << c.stats.max_occupancy
        << " final_occ=" << c.final_occupancy;
    if (c.external) out << " (external)";
    out << "\n";
  }
  return std::move(out).str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading " + path.string());
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed while writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw IoError("not valid JSON: " + path.string());
  return doc;
}

}  // namespace weft
