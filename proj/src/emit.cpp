// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Package emission: hierarchical Verilog wrappers, FIFO/sequencer
// primitives, the structural netlist (design.json), and a digest manifest.
// Every byte written here is a deterministic function of the inputs.
#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "weft/codegen.hpp"
#include "weft/sha256.hpp"

namespace weft {

namespace {

using Json = nlohmann::ordered_json;

// --- small text helpers ----------------------------------------------------

std::string hdl_ident(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())))
    out.insert(out.begin(), '_');
  return out;
}

// "[w-1:0] " for multi-bit nets, empty for single-bit ones.
std::string range(int bits) {
  if (bits <= 1) return "";
  return "[" + std::to_string(bits - 1) + ":0] ";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// --- port lowering ----------------------------------------------------------
//
// Streams lower to a valid/ready handshake whose data bus carries the payload
// plus the end-of-transaction sideband bit (hence bit_width + 1). Input
// streams additionally receive a peek view of the FIFO head so a unit can
// inspect the next token without consuming it. Scalars become 64-bit
// constant inputs. Every module also gets clk/rst and a start/done pair for
// its sequencer.

std::vector<std::string> lowered_port_decls(const TaskMeta& task) {
  std::vector<std::string> decls;
  decls.push_back("input wire clk");
  decls.push_back("input wire rst");
  decls.push_back("input wire start");
  decls.push_back("output wire done");
  for (const auto& p : task.ports) {
    const std::string n = hdl_ident(p.name);
    const std::string data = range(p.bit_width + 1);
    switch (p.direction) {
      case PortDirection::InputStream:
        decls.push_back("input wire " + data + n + "_data");
        decls.push_back("input wire " + n + "_valid");
        decls.push_back("output wire " + n + "_ready");
        decls.push_back("input wire " + data + n + "_peek");
        break;
      case PortDirection::OutputStream:
        decls.push_back("output wire " + data + n + "_data");
        decls.push_back("output wire " + n + "_valid");
        decls.push_back("input wire " + n + "_ready");
        break;
      case PortDirection::Scalar:
        decls.push_back("input wire [63:0] " + n);
        break;
    }
  }
  return decls;
}

std::string module_header(const std::string& name,
                          const std::vector<std::string>& decls) {
  return "module " + hdl_ident(name) + " (\n  " + join(decls, ",\n  ") +
         "\n);\n";
}

// --- fixed primitives -------------------------------------------------------

constexpr const char* kFifoModule = R"(// Generated by weft codegen; do not edit.
//
// Bounded FIFO with first-word fall-through and a peek view of the head
// element. WIDTH covers the payload plus the end-of-transaction sideband
// bit; DEPTH is the channel capacity.
module weft_fifo #(
  parameter WIDTH = 9,
  parameter DEPTH = 2
) (
  input wire clk,
  input wire rst,
  input wire [WIDTH-1:0] wr_data,
  input wire wr_valid,
  output wire wr_ready,
  output wire [WIDTH-1:0] rd_data,
  output wire rd_valid,
  input wire rd_ready,
  output wire [WIDTH-1:0] peek
);
  localparam AW = (DEPTH <= 2) ? 1 : $clog2(DEPTH);

  reg [WIDTH-1:0] mem [0:DEPTH-1];
  reg [AW:0] count;
  reg [AW-1:0] rd_ptr;
  reg [AW-1:0] wr_ptr;

  assign wr_ready = (count != DEPTH);
  assign rd_valid = (count != 0);
  assign rd_data = mem[rd_ptr];
  assign peek = mem[rd_ptr];

  wire do_write = wr_valid && wr_ready;
  wire do_read = rd_valid && rd_ready;

  always @(posedge clk) begin
    if (rst) begin
      count <= 0;
      rd_ptr <= 0;
      wr_ptr <= 0;
    end else begin
      if (do_write) begin
        mem[wr_ptr] <= wr_data;
        wr_ptr <= (wr_ptr == DEPTH - 1) ? {AW{1'b0}} : wr_ptr + 1'b1;
      end
      if (do_read) begin
        rd_ptr <= (rd_ptr == DEPTH - 1) ? {AW{1'b0}} : rd_ptr + 1'b1;
      end
      count <= count + do_write - do_read;
    end
  end
endmodule
)";

constexpr const char* kCtrlModule = R"(// Generated by weft codegen; do not edit.
//
// Sequencer for one parent task: idle until start, run every child
// together, report done once all children have finished, and return to
// idle when start deasserts.
module weft_ctrl #(
  parameter N = 1
) (
  input wire clk,
  input wire rst,
  input wire start,
  output wire done,
  output wire [N-1:0] child_start,
  input wire [N-1:0] child_done
);
  localparam IDLE = 2'd0, RUN = 2'd1, DONE = 2'd2;

  reg [1:0] state;

  assign child_start = {N{state == RUN}};
  assign done = (state == DONE);

  always @(posedge clk) begin
    if (rst) begin
      state <= IDLE;
    end else begin
      case (state)
        IDLE: if (start) state <= RUN;
        RUN: if (&child_done) state <= DONE;
        DONE: if (!start) state <= IDLE;
        default: state <= IDLE;
      endcase
    end
  end
endmodule
)";

// --- per-definition module text ----------------------------------------------

std::string unit_module(const TaskMeta& leaf, const SynthesisResult& unit) {
  std::string text = "// Generated by weft codegen; do not edit.\n";
  text += "// unit " + leaf.name + "\n";
  text += "// content-hash " + leaf.content_hash + "\n";
  text += module_header(leaf.name, lowered_port_decls(leaf));
  std::string body = unit.body;
  if (!body.empty() && body.back() != '\n') body += '\n';
  text += body;
  text += "endmodule\n";
  return text;
}

// Connection list for one child instance inside a parent wrapper. Channel
// bindings attach to the local FIFO's nets, parent-port bindings pass the
// parent's own pins straight through, scalar bindings become literals.
std::vector<std::string> child_pins(const TaskMeta& child_def,
                                    const ChildDecl& child) {
  auto binding_for = [&](const std::string& port) -> const Binding& {
    for (const auto& [name, b] : child.bindings)
      if (name == port) return b;
    throw Error("definition " + child_def.name + " port " + port +
                " has no binding");
  };

  std::vector<std::string> pins;
  pins.push_back(".clk(clk)");
  pins.push_back(".rst(rst)");
  for (const auto& p : child_def.ports) {
    const Binding& b = binding_for(p.name);
    const std::string n = hdl_ident(p.name);
    if (p.direction == PortDirection::Scalar) {
      if (b.kind == Binding::Kind::Scalar)
        pins.push_back("." + n + "(64'd" + std::to_string(b.value) + ")");
      else
        pins.push_back("." + n + "(" + hdl_ident(b.target) + ")");
      continue;
    }
    if (b.kind == Binding::Kind::Channel) {
      const std::string ch = hdl_ident(b.target);
      if (p.direction == PortDirection::InputStream) {
        pins.push_back("." + n + "_data(" + ch + "_rd_data)");
        pins.push_back("." + n + "_valid(" + ch + "_rd_valid)");
        pins.push_back("." + n + "_ready(" + ch + "_rd_ready)");
        pins.push_back("." + n + "_peek(" + ch + "_peek)");
      } else {
        pins.push_back("." + n + "_data(" + ch + "_wr_data)");
        pins.push_back("." + n + "_valid(" + ch + "_wr_valid)");
        pins.push_back("." + n + "_ready(" + ch + "_wr_ready)");
      }
    } else {  // parent port, same direction as the child port
      const std::string pp = hdl_ident(b.target);
      pins.push_back("." + n + "_data(" + pp + "_data)");
      pins.push_back("." + n + "_valid(" + pp + "_valid)");
      pins.push_back("." + n + "_ready(" + pp + "_ready)");
      if (p.direction == PortDirection::InputStream)
        pins.push_back("." + n + "_peek(" + pp + "_peek)");
    }
  }
  return pins;
}

std::string parent_module(const TaskMeta& parent, const DesignMetadata& meta) {
  std::string text = "// Generated by weft codegen; do not edit.\n";
  text += "// parent wrapper " + parent.name + "\n";
  text += module_header(parent.name, lowered_port_decls(parent));

  for (const auto& ch : parent.channels) {
    const std::string n = hdl_ident(ch.name);
    const std::string data = range(ch.bit_width + 1);
    text += "\n  // channel " + ch.name + "\n";
    text += "  wire " + data + n + "_wr_data;\n";
    text += "  wire " + n + "_wr_valid;\n";
    text += "  wire " + n + "_wr_ready;\n";
    text += "  wire " + data + n + "_rd_data;\n";
    text += "  wire " + n + "_rd_valid;\n";
    text += "  wire " + n + "_rd_ready;\n";
    text += "  wire " + data + n + "_peek;\n";
    text += "  weft_fifo #(.WIDTH(" + std::to_string(ch.bit_width + 1) +
            "), .DEPTH(" + std::to_string(ch.capacity) + ")) " + n +
            "_fifo (\n";
    std::vector<std::string> pins = {
        ".clk(clk)",
        ".rst(rst)",
        ".wr_data(" + n + "_wr_data)",
        ".wr_valid(" + n + "_wr_valid)",
        ".wr_ready(" + n + "_wr_ready)",
        ".rd_data(" + n + "_rd_data)",
        ".rd_valid(" + n + "_rd_valid)",
        ".rd_ready(" + n + "_rd_ready)",
        ".peek(" + n + "_peek)",
    };
    text += "    " + join(pins, ",\n    ") + "\n  );\n";
  }

  const int n_children = static_cast<int>(parent.children.size());
  text += "\n  wire [" + std::to_string(n_children - 1) + ":0] ctrl_start;\n";
  text += "  wire [" + std::to_string(n_children - 1) + ":0] ctrl_done;\n";

  std::map<std::string, int> occurrence;
  for (std::size_t i = 0; i < parent.children.size(); ++i) {
    const ChildDecl& child = parent.children[i];
    const TaskMeta* child_def = meta.find_task(child.definition);
    if (child_def == nullptr)
      throw Error("parent " + parent.name + " instantiates unknown definition " +
                  child.definition);
    const int k = occurrence[child.definition]++;
    std::vector<std::string> pins = child_pins(*child_def, child);
    pins.insert(pins.begin() + 2,
                {".start(ctrl_start[" + std::to_string(i) + "])",
                 ".done(ctrl_done[" + std::to_string(i) + "])"});
    text += "\n  " + hdl_ident(child.definition) + " " +
            hdl_ident(child.definition) + "_" + std::to_string(k) + " (\n";
    text += "    " + join(pins, ",\n    ") + "\n  );\n";
  }

  text += "\n  weft_ctrl #(.N(" + std::to_string(n_children) + ")) ctrl (\n";
  std::vector<std::string> pins = {
      ".clk(clk)",          ".rst(rst)",
      ".start(start)",      ".done(done)",
      ".child_start(ctrl_start)", ".child_done(ctrl_done)",
  };
  text += "    " + join(pins, ",\n    ") + "\n  );\n";
  text += "endmodule\n";
  return text;
}

// Shim used when the top itself is a leaf: same interface, no sequencer.
std::string leaf_top_wrapper(const TaskMeta& top) {
  std::string text = "// Generated by weft codegen; do not edit.\n";
  text += "// top-level shim for leaf " + top.name + "\n";
  text += module_header(top.name + "_wrapper", lowered_port_decls(top));
  std::vector<std::string> pins = {".clk(clk)", ".rst(rst)", ".start(start)",
                                   ".done(done)"};
  for (const auto& p : top.ports) {
    const std::string n = hdl_ident(p.name);
    if (p.direction == PortDirection::Scalar) {
      pins.push_back("." + n + "(" + n + ")");
      continue;
    }
    pins.push_back("." + n + "_data(" + n + "_data)");
    pins.push_back("." + n + "_valid(" + n + "_valid)");
    pins.push_back("." + n + "_ready(" + n + "_ready)");
    if (p.direction == PortDirection::InputStream)
      pins.push_back("." + n + "_peek(" + n + "_peek)");
  }
  text += "  " + hdl_ident(top.name) + " u (\n    " + join(pins, ",\n    ") +
          "\n  );\nendmodule\n";
  return text;
}

// --- structural netlist -------------------------------------------------------

Json net_pin(const std::string& module, const std::string& pin) {
  Json j;
  j["module"] = module;
  j["pin"] = pin;
  return j;
}

Json wire_row(const std::string& name, int width, Json from, Json to) {
  Json j;
  j["name"] = name;
  j["width"] = width;
  j["from"] = std::move(from);
  j["to"] = std::move(to);
  return j;
}

// The seven nets that realize one internal channel, plus the boundary nets
// of external channels. A consumer's peek pin always pairs with the same
// data that rd_data carries; for external inputs it is fed straight from the
// boundary data pin.
void append_channel_wires(const TopologyRow& row, const std::string& top,
                          Json& wires) {
  const int data_w = row.bit_width + 1;
  if (!row.external) {
    const std::string fifo = "fifo:" + row.channel;
    wires.push_back(wire_row(
        row.channel + ".wr_data", data_w,
        net_pin(row.producer_instance, row.producer_port + "_data"),
        net_pin(fifo, "wr_data")));
    wires.push_back(wire_row(
        row.channel + ".wr_valid", 1,
        net_pin(row.producer_instance, row.producer_port + "_valid"),
        net_pin(fifo, "wr_valid")));
    wires.push_back(wire_row(
        row.channel + ".wr_ready", 1, net_pin(fifo, "wr_ready"),
        net_pin(row.producer_instance, row.producer_port + "_ready")));
    wires.push_back(wire_row(
        row.channel + ".rd_data", data_w, net_pin(fifo, "rd_data"),
        net_pin(row.consumer_instance, row.consumer_port + "_data")));
    wires.push_back(wire_row(
        row.channel + ".rd_valid", 1, net_pin(fifo, "rd_valid"),
        net_pin(row.consumer_instance, row.consumer_port + "_valid")));
    wires.push_back(wire_row(
        row.channel + ".rd_ready", 1,
        net_pin(row.consumer_instance, row.consumer_port + "_ready"),
        net_pin(fifo, "rd_ready")));
    wires.push_back(wire_row(
        row.channel + ".peek", data_w, net_pin(fifo, "peek"),
        net_pin(row.consumer_instance, row.consumer_port + "_peek")));
    return;
  }

  // External channel: the boundary pin names drop the "<top>/" prefix.
  const std::string port = row.channel.substr(top.size() + 1);
  if (row.producer_instance.empty()) {  // design input
    wires.push_back(wire_row(
        row.channel + ".data", data_w, net_pin("top", port + "_data"),
        net_pin(row.consumer_instance, row.consumer_port + "_data")));
    wires.push_back(wire_row(
        row.channel + ".valid", 1, net_pin("top", port + "_valid"),
        net_pin(row.consumer_instance, row.consumer_port + "_valid")));
    wires.push_back(wire_row(
        row.channel + ".ready", 1,
        net_pin(row.consumer_instance, row.consumer_port + "_ready"),
        net_pin("top", port + "_ready")));
    wires.push_back(wire_row(
        row.channel + ".peek", data_w, net_pin("top", port + "_data"),
        net_pin(row.consumer_instance, row.consumer_port + "_peek")));
  } else {  // design output
    wires.push_back(wire_row(
        row.channel + ".data", data_w,
        net_pin(row.producer_instance, row.producer_port + "_data"),
        net_pin("top", port + "_data")));
    wires.push_back(wire_row(
        row.channel + ".valid", 1,
        net_pin(row.producer_instance, row.producer_port + "_valid"),
        net_pin("top", port + "_valid")));
    wires.push_back(wire_row(
        row.channel + ".ready", 1, net_pin("top", port + "_ready"),
        net_pin(row.producer_instance, row.producer_port + "_ready")));
  }
}

Json build_design_json(const DesignMetadata& meta,
                       const std::vector<std::string>& package_files) {
  Json doc;
  doc["top"] = meta.top;

  Json units = Json::array();
  for (const auto& t : meta.tasks) {
    if (t.kind != TaskKind::Leaf) continue;
    Json u;
    u["definition"] = t.name;
    u["content_hash"] = t.content_hash;
    Json ports = Json::array();
    for (const auto& p : t.ports) {
      Json jp;
      jp["name"] = p.name;
      jp["direction"] = std::string(to_string(p.direction));
      jp["token_type"] = p.token_type;
      jp["bit_width"] = p.bit_width;
      ports.push_back(std::move(jp));
    }
    u["ports"] = std::move(ports);
    u["file"] = t.name + ".v";
    units.push_back(std::move(u));
  }
  doc["units"] = std::move(units);

  Json instances = Json::array();
  for (const auto& inst : meta.instances) {
    Json ji;
    ji["path"] = inst.path;
    ji["unit"] = inst.definition;
    Json scalars = Json::object();
    for (const auto& s : inst.scalars) scalars[s.port] = s.value;
    ji["scalars"] = std::move(scalars);
    instances.push_back(std::move(ji));
  }
  doc["instances"] = std::move(instances);

  Json fifos = Json::array();
  for (const auto& row : meta.topology) {
    if (row.external) continue;
    Json f;
    f["name"] = row.channel;
    f["token_type"] = row.token_type;
    f["width"] = row.bit_width + 1;
    f["depth"] = row.capacity;
    Json producer;
    producer["instance"] = row.producer_instance;
    producer["port"] = row.producer_port;
    f["producer"] = std::move(producer);
    Json consumer;
    consumer["instance"] = row.consumer_instance;
    consumer["port"] = row.consumer_port;
    f["consumer"] = std::move(consumer);
    fifos.push_back(std::move(f));
  }
  doc["fifos"] = std::move(fifos);

  Json wires = Json::array();
  for (const auto& row : meta.topology)
    append_channel_wires(row, meta.top, wires);
  doc["wires"] = std::move(wires);

  Json fsms = Json::array();
  for (const auto& par : meta.parents) {
    Json jf;
    jf["path"] = par.path;
    jf["definition"] = par.definition;
    jf["children"] = par.child_paths;
    fsms.push_back(std::move(jf));
  }
  doc["fsms"] = std::move(fsms);

  Json top_args = Json::array();
  if (const TaskMeta* top = meta.find_task(meta.top)) {
    for (const auto& p : top->ports) {
      Json ja;
      ja["name"] = p.name;
      ja["kind"] = std::string(to_string(p.direction));
      ja["token_type"] = p.token_type;
      ja["width"] = p.direction == PortDirection::Scalar ? 64 : p.bit_width;
      top_args.push_back(std::move(ja));
    }
  }
  doc["top_args"] = std::move(top_args);

  doc["manifest"] = package_files;
  return doc;
}

void check_port_widths(const DesignMetadata& meta) {
  std::map<std::string, const TaskInstance*> by_path;
  for (const auto& inst : meta.instances) by_path[inst.path] = &inst;

  auto check_end = [&](const std::string& inst_path, const std::string& port,
                       const TopologyRow& row) {
    if (inst_path.empty()) return;  // design boundary
    auto it = by_path.find(inst_path);
    if (it == by_path.end())
      throw Error("channel " + row.channel + " references unknown instance " +
                  inst_path);
    const TaskMeta* task = meta.find_task(it->second->definition);
    const PortMeta* pm = nullptr;
    if (task != nullptr)
      for (const auto& p : task->ports)
        if (p.name == port) pm = &p;
    if (pm == nullptr)
      throw Error("channel " + row.channel + " references unknown port " +
                  inst_path + "." + port);
    if (pm->bit_width != row.bit_width)
      throw WidthMismatchError(
          "unit " + task->name + " port " + port + " is " +
          std::to_string(pm->bit_width) + " bits but channel " + row.channel +
          " carries " + std::to_string(row.bit_width));
  };

  for (const auto& row : meta.topology) {
    check_end(row.producer_instance, row.producer_port, row);
    check_end(row.consumer_instance, row.consumer_port, row);
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

EmitResult emit_design(const DesignMetadata& meta,
                       const std::vector<SynthesisResult>& units,
                       const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;

  std::map<std::string, const SynthesisResult*> unit_of;
  for (const auto& u : units) unit_of[u.definition] = &u;
  for (const auto& t : meta.tasks)
    if (t.kind == TaskKind::Leaf && unit_of.find(t.name) == unit_of.end())
      throw MissingUnitError("no synthesized unit for definition: " + t.name);

  check_port_widths(meta);

  // Assemble every file's bytes first; write nothing until the whole
  // package checks out.
  std::map<std::string, std::string> files;  // name -> content

  bool any_fifo = false;
  bool any_parent = false;
  for (const auto& t : meta.tasks) {
    if (t.kind == TaskKind::Leaf) {
      files[t.name + ".v"] = unit_module(t, *unit_of.at(t.name));
    } else {
      any_parent = true;
      if (!t.channels.empty()) any_fifo = true;
      files[t.name + ".v"] = parent_module(t, meta);
    }
  }
  if (meta.top_is_leaf)
    if (const TaskMeta* top = meta.find_task(meta.top))
      files[top->name + "_wrapper.v"] = leaf_top_wrapper(*top);
  if (any_fifo) files["weft_fifo.v"] = kFifoModule;
  if (any_parent) files["weft_ctrl.v"] = kCtrlModule;

  std::vector<std::string> package_files;
  for (const auto& [name, content] : files) package_files.push_back(name);
  package_files.push_back("design.json");
  std::sort(package_files.begin(), package_files.end());

  files["design.json"] = dump_json(build_design_json(meta, package_files));

  Json manifest;
  Json entries = Json::array();
  for (const auto& [name, content] : files) {
    Json e;
    e["name"] = name;
    e["sha256"] = sha256_hex(content);
    e["size"] = content.size();
    entries.push_back(std::move(e));
  }
  manifest["files"] = std::move(entries);
  files["manifest.json"] = dump_json(manifest);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + out_dir.string() + ": " +
                  ec.message());

  EmitResult result;
  result.unchanged = true;
  for (const auto& [name, content] : files) {
    result.files[name] = sha256_hex(content);

    const fs::path path = out_dir / name;
    std::string existing;
    {
      std::ifstream in(path, std::ios::binary);
      if (in) {
        std::ostringstream buf;
        buf << in.rdbuf();
        existing = buf.str();
      }
    }
    if (existing == content) continue;

    result.unchanged = false;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
  }
  return result;
}

bool verify_manifest(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;

  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  Json manifest;
  try {
    in >> manifest;
  } catch (const Json::exception& e) {
    throw IoError("malformed manifest " + manifest_path.string() + ": " +
                  e.what());
  }

  if (!manifest.contains("files") || !manifest["files"].is_array())
    throw IoError("malformed manifest " + manifest_path.string() +
                  ": missing files array");

  for (const auto& entry : manifest["files"]) {
    const std::string name = entry.value("name", "");
    const std::string want = entry.value("sha256", "");
    std::ifstream f(dir / name, std::ios::binary);
    if (!f) return false;
    std::ostringstream buf;
    buf << f.rdbuf();
    const std::string content = buf.str();
    if (sha256_hex(content) != want) return false;
    if (entry.contains("size") &&
        entry["size"].get<std::uint64_t>() != content.size())
      return false;
  }
  return true;
}

}  // namespace weft
