// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
//
// Graph exchange format: round-trips, behavior re-attachment, and rejection
// of malformed documents.
#include <string>

#include "doctest.h"
#include "weft/bench.hpp"
#include "weft/graph.hpp"
#include "weft/json_io.hpp"
#include "weft/scheduler.hpp"

using namespace weft;

TEST_CASE("every built-in graph survives a serialize/parse round trip") {
  for (const auto& entry : bench_registry()) {
    CAPTURE(entry.name);
    ProgramGraph original = entry.make({})->graph();
    Json doc = graph_to_json(original);
    ProgramGraph back = graph_from_json(doc);

    // Re-serialization is byte-stable: same document, same bytes.
    CHECK(graph_to_json(back).dump() == doc.dump());

    // The imported graph elaborates identically.
    FlatGraph f1 = flatten(original);
    FlatGraph f2 = flatten(back);
    REQUIRE(f1.instances.size() == f2.instances.size());
    for (std::size_t i = 0; i < f1.instances.size(); ++i) {
      CHECK(f1.instances[i].path == f2.instances[i].path);
      CHECK(f1.instances[i].definition == f2.instances[i].definition);
    }
    REQUIRE(f1.channels.size() == f2.channels.size());
    for (std::size_t i = 0; i < f1.channels.size(); ++i) {
      CHECK(f1.channels[i].path == f2.channels[i].path);
      CHECK(f1.channels[i].capacity == f2.channels[i].capacity);
      CHECK(f1.channels[i].bit_width == f2.channels[i].bit_width);
    }
  }
}

TEST_CASE("imported graphs carry fingerprints, not behaviors") {
  ProgramGraph original = make_bench("pipeline")->graph();
  ProgramGraph back = graph_from_json(graph_to_json(original));
  for (const auto& def : back.definitions())
    if (def.kind == TaskKind::Leaf) {
      CHECK_FALSE(def.behavior);          // factories do not ride through text
      CHECK_FALSE(def.behavior_key.empty());
    }
}

TEST_CASE("registry behaviors re-attach by fingerprint and the graph runs") {
  ProgramGraph back =
      graph_from_json(graph_to_json(make_bench("pipeline")->graph()));
  int attached = attach_behaviors(back);
  CHECK(attached == 2);  // producer and consumer
  Simulation sim(back, {});
  RunReport report = sim.run();
  CHECK(report.outcome == Outcome::Completed);
}

TEST_CASE("attach_behaviors leaves unknown fingerprints alone") {
  ProgramGraph g;
  g.add_token_type({"word", 8});
  TaskDefinition leaf;
  leaf.name = "Mystery";
  leaf.kind = TaskKind::Leaf;
  leaf.behavior_key = "no-such-behavior";
  g.add_definition(std::move(leaf));
  g.set_top("Mystery");
  CHECK(attach_behaviors(g) == 0);
  CHECK_FALSE(g.definitions()[0].behavior);
}

TEST_CASE("attach_behavior rejects parents and unknown names") {
  ProgramGraph g = make_bench("pipeline")->graph();
  BehaviorFactory noop = [] { return std::unique_ptr<LeafBehavior>(); };
  CHECK_THROWS_AS(g.attach_behavior("pipeline", noop), Error);
  CHECK_THROWS_AS(g.attach_behavior("NoSuchLeaf", noop), Error);
}

TEST_CASE("malformed documents are rejected with IoError") {
  CHECK_THROWS_AS(graph_from_json(Json::parse("[]")), IoError);
  CHECK_THROWS_AS(graph_from_json(Json::parse("{}")), IoError);
  CHECK_THROWS_AS(
      graph_from_json(Json::parse(
          R"({"token_types": [], "definitions": "nope", "top": "x"})")),
      IoError);
  CHECK_THROWS_AS(
      graph_from_json(Json::parse(
          R"({"token_types": [{"name": "w"}], "definitions": [], "top": ""})")),
      IoError);
}

TEST_CASE("scalar bindings and capacities survive the round trip") {
  BenchParams p;
  p.size = 3;
  p.packets = 5;
  ProgramGraph original = make_bench("ring", p)->graph();
  ProgramGraph back = graph_from_json(graph_to_json(original));
  FlatGraph f1 = flatten(original);
  FlatGraph f2 = flatten(back);
  REQUIRE(f1.instances.size() == f2.instances.size());
  for (std::size_t i = 0; i < f1.instances.size(); ++i) {
    REQUIRE(f1.instances[i].scalars.size() == f2.instances[i].scalars.size());
    for (std::size_t k = 0; k < f1.instances[i].scalars.size(); ++k) {
      CHECK(f1.instances[i].scalars[k].port == f2.instances[i].scalars[k].port);
      CHECK(f1.instances[i].scalars[k].value == f2.instances[i].scalars[k].value);
    }
  }
}
