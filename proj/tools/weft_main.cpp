// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands:
//
//   sim <target>      simulate a benchmark or an imported graph file
//   bench list|run    enumerate or run the built-in workloads
//   graph <target>    print flattened stats or export the exchange document
//   codegen <target>  synthesize each unique leaf once and emit the package
//   trace <target>    run with event tracing and write the trace text
//
// A <target> is either `bench:<name>` (canonical), a bare benchmark name, or
// a path to a graph exchange JSON file. Imported graphs get behaviors
// re-attached from the registry by their `behavior` fingerprints; leaves
// whose fingerprint is unknown cannot be simulated.
//
// Exit codes: 0 completed; 2 deadlock or sequential failure; 3 watchdog
// expired; 4 oracle mismatch on a completed benchmark run; 1 anything else
// (usage, I/O, unknown names).
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weft/bench.hpp"
#include "weft/codegen.hpp"
#include "weft/errors.hpp"
#include "weft/graph.hpp"
#include "weft/json_io.hpp"
#include "weft/scheduler.hpp"
#include "weft/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBlocked = 2;   // Deadlock / SequentialFailure
constexpr int kExitWatchdog = 3;  // WatchdogExpired
constexpr int kExitOracle = 4;    // run completed, oracle disagreed

int outcome_exit_code(weft::Outcome o) {
  switch (o) {
    case weft::Outcome::Completed:
      return kExitOk;
    case weft::Outcome::Deadlock:
    case weft::Outcome::SequentialFailure:
      return kExitBlocked;
    case weft::Outcome::WatchdogExpired:
      return kExitWatchdog;
  }
  return kExitError;
}

// Workload knobs shared by every subcommand that builds a benchmark.
struct BenchFlags {
  weft::BenchParams params;

  void attach(CLI::App* cmd) {
    cmd->add_option("--size", params.size,
                    "workload scale (nodes, grid dim, lanes, vertices)");
    cmd->add_option("--instances", params.instances,
                    "stress: relay cycle length");
    cmd->add_option("--workload-seed", params.seed,
                    "seed for generated workload content");
    cmd->add_option("--packets", params.packets,
                    "packets per producer (-1: bench default)");
    cmd->add_option("--records", params.records,
                    "network: records injected (-1: bench default)");
    cmd->add_option("--offset", params.offset,
                    "ring: fixed destination offset (0: seeded)");
    cmd->add_option("--iters", params.iters,
                    "page_rank: iterations (-1: bench default)");
    cmd->add_option("--damping", params.damping, "page_rank: damping factor");
    cmd->add_option("--variant", params.variant,
                    "page_rank topology: 0 seeded, 1 cycle, 2 star");
  }
};

// Scheduler knobs shared by sim / bench run / trace.
struct SchedFlags {
  weft::SchedulerConfig config;
  std::string scheduler = "coroutine";

  void attach(CLI::App* cmd) {
    cmd->add_option("--scheduler", scheduler, "coroutine | sequential")
        ->check(CLI::IsMember({"coroutine", "sequential"}));
    cmd->add_option("--workers", config.workers, "worker threads (coroutine)")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--seed", config.seed, "scheduler seed (initial ready order)");
    cmd->add_option("--max-steps", config.max_steps,
                    "watchdog: max resume slices before giving up");
  }

  weft::SchedulerConfig resolved() const {
    weft::SchedulerConfig c = config;
    c.mode = scheduler == "sequential" ? weft::SchedulerConfig::Mode::Sequential
                                       : weft::SchedulerConfig::Mode::Coroutine;
    return c;
  }
};

bool looks_like_file(const std::string& target) {
  return target.find('/') != std::string::npos ||
         target.ends_with(".json") || std::filesystem::exists(target);
}

// `bench:<name>` (canonical) or a bare registered name.
std::optional<std::string> bench_name_of(const std::string& target) {
  if (target.starts_with("bench:")) return target.substr(6);
  if (looks_like_file(target)) return std::nullopt;
  return target;
}

// An imported graph carries behavior fingerprints, not behaviors; bind what
// the registry knows and reject the rest by name.
weft::ProgramGraph load_graph_file(const std::string& path) {
  weft::ProgramGraph graph = weft::graph_from_json(weft::read_json_file(path));
  weft::attach_behaviors(graph);
  return graph;
}

std::vector<std::string> leaves_without_behavior(const weft::ProgramGraph& g) {
  std::vector<std::string> missing;
  for (const auto& def : g.definitions())
    if (def.kind == weft::TaskKind::Leaf && !def.behavior)
      missing.push_back(def.name);
  return missing;
}

void write_or_print(const std::optional<std::string>& path,
                    const std::string& content) {
  if (path)
    weft::write_text_file(*path, content);
  else
    std::cout << content;
}

void print_report(const weft::RunReport& report, const std::string& format) {
  if (format == "json")
    std::cout << weft::run_report_to_json(report).dump(2) << "\n";
  else
    std::cout << weft::render_run_report(report);
}

// How a run's results leave the process. trace_only suppresses the report
// and prints just the event stream (the `trace` subcommand's contract);
// trace_out of nullopt then means stdout.
struct OutputPlan {
  std::string format = "text";
  bool trace_only = false;
  std::optional<std::string> trace_out;

  bool want_trace() const { return trace_only || trace_out.has_value(); }

  void deliver(const weft::RunReport& report) const {
    if (!trace_only) print_report(report, format);
    if (want_trace()) write_or_print(trace_out, weft::render_trace(report.trace));
  }
};

int run_bench(const std::string& name, const BenchFlags& bf,
              const SchedFlags& sf, const OutputPlan& out) {
  std::unique_ptr<weft::Bench> bench = weft::make_bench(name, bf.params);
  weft::SchedulerConfig config = sf.resolved();
  config.trace = config.trace || out.want_trace();
  auto [report, verdict] = bench->run_and_verify(config);
  out.deliver(report);
  if (!out.trace_only && out.format != "json")
    std::cout << "oracle: " << (verdict.ok ? "ok" : "MISMATCH") << " — "
              << verdict.detail << "\n";
  if (report.outcome != weft::Outcome::Completed)
    return outcome_exit_code(report.outcome);
  return verdict.ok ? kExitOk : kExitOracle;
}

int run_graph_file(const std::string& path, const SchedFlags& sf,
                   const OutputPlan& out) {
  weft::ProgramGraph graph = load_graph_file(path);
  if (auto missing = leaves_without_behavior(graph); !missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw weft::Error("no registered behavior for leaf definitions: " + names);
  }
  weft::SchedulerConfig config = sf.resolved();
  config.trace = config.trace || out.want_trace();
  weft::Simulation sim(graph, config);
  weft::close_external_inputs(graph, sim);
  weft::RunReport report = sim.run();
  out.deliver(report);
  return outcome_exit_code(report.outcome);
}

// Builds the graph a target names: a benchmark's graph or an imported file.
weft::ProgramGraph target_graph(const std::string& target, const BenchFlags& bf) {
  if (auto name = bench_name_of(target))
    return weft::make_bench(*name, bf.params)->graph();
  return load_graph_file(target);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weft: task-parallel dataflow simulator and code generator"};
  app.require_subcommand(1);

  // --- sim ---------------------------------------------------------------
  std::string sim_target;
  BenchFlags sim_bench;
  SchedFlags sim_sched;
  std::string sim_format = "text";
  std::optional<std::string> sim_trace_out;
  CLI::App* sim = app.add_subcommand(
      "sim", "simulate a benchmark (bench:<name>) or a graph file");
  sim->add_option("target", sim_target, "bench:<name>, bare name, or file")
      ->required();
  sim_bench.attach(sim);
  sim_sched.attach(sim);
  sim->add_option("--format", sim_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));
  sim->add_option("--trace-out", sim_trace_out,
                  "also record a trace and write it to this file");

  // --- bench -------------------------------------------------------------
  CLI::App* bench = app.add_subcommand("bench", "built-in workloads");
  bench->require_subcommand(1);
  CLI::App* bench_list = bench->add_subcommand("list", "list workloads");
  std::string bench_run_name;
  BenchFlags bench_run_bench;
  SchedFlags bench_run_sched;
  std::string bench_run_format = "text";
  CLI::App* bench_run = bench->add_subcommand("run", "run one workload");
  bench_run->add_option("name", bench_run_name, "workload name")->required();
  bench_run_bench.attach(bench_run);
  bench_run_sched.attach(bench_run);
  bench_run->add_option("--format", bench_run_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  // --- graph -------------------------------------------------------------
  std::string graph_target;
  BenchFlags graph_bench;
  bool graph_stats = false;
  std::optional<std::string> graph_export;
  CLI::App* graph = app.add_subcommand("graph", "inspect or export a graph");
  graph->add_option("target", graph_target, "bench:<name>, bare name, or file")
      ->required();
  graph_bench.attach(graph);
  graph->add_flag("--stats", graph_stats,
                  "print flattened definition/instance/channel counts");
  graph->add_option("--export", graph_export,
                    "write the graph exchange document to this file");

  // --- codegen -----------------------------------------------------------
  std::string cg_target;
  BenchFlags cg_bench;
  std::string cg_out;
  int cg_jobs = 1;
  std::string cg_backend = "mock";
  std::string cg_backend_cmd;
  CLI::App* cg = app.add_subcommand(
      "codegen", "compile each unique leaf once and emit the package");
  cg->add_option("target", cg_target, "bench:<name>, bare name, or file")
      ->required();
  cg_bench.attach(cg);
  cg->add_option("--out", cg_out, "package output directory")->required();
  cg->add_option("--jobs", cg_jobs, "parallel synthesis jobs")
      ->check(CLI::Range(1, 4096));
  cg->add_option("--backend", cg_backend, "mock | command")
      ->check(CLI::IsMember({"mock", "command"}));
  cg->add_option("--backend-cmd", cg_backend_cmd,
                 "shell command reading a leaf description JSON on stdin");

  // --- trace -------------------------------------------------------------
  std::string tr_target;
  BenchFlags tr_bench;
  SchedFlags tr_sched;
  std::optional<std::string> tr_out;
  CLI::App* tr = app.add_subcommand("trace", "run and write the event trace");
  tr->add_option("target", tr_target, "bench:<name>, bare name, or file")
      ->required();
  tr_bench.attach(tr);
  tr_sched.attach(tr);
  tr->add_option("--out", tr_out, "trace file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      OutputPlan out{sim_format, false, sim_trace_out};
      if (auto name = bench_name_of(sim_target))
        return run_bench(*name, sim_bench, sim_sched, out);
      return run_graph_file(sim_target, sim_sched, out);
    }

    if (bench_list->parsed()) {
      for (const auto& entry : weft::bench_registry())
        std::cout << entry.name << "  —  " << entry.summary << "\n";
      return kExitOk;
    }
    if (bench_run->parsed())
      return run_bench(bench_run_name, bench_run_bench, bench_run_sched,
                       OutputPlan{bench_run_format, false, std::nullopt});

    if (graph->parsed()) {
      weft::ProgramGraph g = target_graph(graph_target, graph_bench);
      if (graph_export)
        weft::write_text_file(*graph_export, weft::graph_to_json(g).dump(2) + "\n");
      if (graph_stats || !graph_export) {
        weft::GraphStats s = weft::stats(g);
        std::cout << "definitions: " << s.num_definitions
                  << "\ninstances: " << s.num_instances
                  << "\nchannels: " << s.num_channels << "\n";
      }
      return kExitOk;
    }

    if (cg->parsed()) {
      weft::ProgramGraph g = target_graph(cg_target, cg_bench);
      weft::DesignMetadata meta = weft::extract_metadata(g);
      if (cg_backend == "command" && cg_backend_cmd.empty())
        throw weft::Error("--backend command requires --backend-cmd");
      std::unique_ptr<weft::SynthesisBackend> backend =
          cg_backend == "command" ? weft::make_command_backend(cg_backend_cmd)
                                  : weft::make_mock_backend();
      auto [units, stats] = weft::synthesize_tasks(meta, *backend, cg_jobs);
      weft::EmitResult emitted = weft::emit_design(meta, units, cg_out);
      std::cout << "unique_units: " << stats.unique_units << "\n"
                << "total_instances: " << meta.total_leaf_instances() << "\n"
                << "backend_calls: " << stats.backend_calls << "\n"
                << "jobs: " << stats.jobs << "\n"
                << "wall_slots: " << stats.wall_slots << "\n"
                << "files: " << emitted.files.size()
                << (emitted.unchanged ? " (unchanged)" : "") << "\n";
      return kExitOk;
    }

    if (tr->parsed()) {
      OutputPlan out{"text", true, tr_out};
      if (auto name = bench_name_of(tr_target))
        return run_bench(*name, tr_bench, tr_sched, out);
      return run_graph_file(tr_target, tr_sched, out);
    }
  } catch (const weft::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
