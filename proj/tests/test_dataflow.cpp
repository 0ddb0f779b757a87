#include <doctest.h>

#include "reflow/dataflow.hpp"
#include "reflow/harness.hpp"
#include "reflow/json_io.hpp"
#include "reflow/validation.hpp"
#include "support/fixtures.hpp"

using namespace reflow;

TEST_CASE("parse the etl-a document") {
    Dataflow d = parse_dataflow(fixtures::read_fixture("etl-a.json"));
    CHECK(d.name == "A");
    CHECK(d.tasks.size() == 5);
    CHECK(d.streams.size() == 4);
    CHECK(d.source_ids() == std::vector<std::string>{"src"});
    CHECK(d.sink_ids() == std::vector<std::string>{"store"});
}

TEST_CASE("parse minimal two-task dataflow") {
    Dataflow d = parse_dataflow(R"({
        "name": "mini",
        "tasks": [
            {"id": "in", "type": "feed", "config": "source"},
            {"id": "out", "type": "store", "config": "sink"}
        ],
        "streams": [{"from": "in", "to": "out"}]
    })");
    CHECK(d.tasks.size() == 2);
    CHECK(d.streams.size() == 1);
}

TEST_CASE("parse rejections") {
    SUBCASE("malformed JSON") {
        CHECK_THROWS_AS(parse_dataflow("{not json"), ParseError);
    }
    SUBCASE("missing fields") {
        CHECK_THROWS_AS(parse_dataflow(R"({"name":"x","tasks":[{"id":"a"}],"streams":[]})"),
                        ParseError);
    }
    SUBCASE("cycle t1->t2->t1") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "cyc",
            "tasks": [
                {"id": "s", "type": "feed", "config": "source"},
                {"id": "t1", "type": "a", "config": "x"},
                {"id": "t2", "type": "b", "config": "y"},
                {"id": "k", "type": "store", "config": "sink"}
            ],
            "streams": [
                {"from": "s", "to": "t1"},
                {"from": "t1", "to": "t2"},
                {"from": "t2", "to": "t1"},
                {"from": "t2", "to": "k"}
            ]
        })"),
                        CycleError);
    }
    SUBCASE("duplicate task id") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "dup",
            "tasks": [
                {"id": "s", "type": "feed", "config": "source"},
                {"id": "s", "type": "feed2", "config": "z"},
                {"id": "k", "type": "store", "config": "sink"}
            ],
            "streams": [{"from": "s", "to": "k"}]
        })"),
                        DuplicateIdError);
    }
    SUBCASE("source with incoming stream") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "bad",
            "tasks": [
                {"id": "s", "type": "feed", "config": "source"},
                {"id": "m", "type": "op", "config": "x"},
                {"id": "s2", "type": "feed2", "config": "source"},
                {"id": "k", "type": "store", "config": "sink"}
            ],
            "streams": [
                {"from": "s", "to": "m"},
                {"from": "m", "to": "s2"},
                {"from": "s2", "to": "k"}
            ]
        })"),
                        BoundaryError);
    }
    SUBCASE("no sink") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "nosink",
            "tasks": [{"id": "s", "type": "feed", "config": "source"}],
            "streams": []
        })"),
                        BoundaryError);
    }
    SUBCASE("unknown stream endpoint") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "ref",
            "tasks": [
                {"id": "s", "type": "feed", "config": "source"},
                {"id": "k", "type": "store", "config": "sink"}
            ],
            "streams": [{"from": "s", "to": "ghost"}]
        })"),
                        ParseError);
    }
    SUBCASE("two equivalent tasks") {
        CHECK_THROWS_AS(parse_dataflow(R"({
            "name": "dupeq",
            "tasks": [
                {"id": "s", "type": "feed", "config": "source"},
                {"id": "a1", "type": "op", "config": "x"},
                {"id": "a2", "type": "op", "config": "x"},
                {"id": "k", "type": "store", "config": "sink"}
            ],
            "streams": [
                {"from": "s", "to": "a1"},
                {"from": "s", "to": "a2"},
                {"from": "a1", "to": "k"},
                {"from": "a2", "to": "k"}
            ]
        })"),
                        NotDedupError);
    }
}

TEST_CASE("validate reports instead of throwing") {
    SUBCASE("etl-b is clean") {
        ValidationReport r = validate(fixtures::etl_b());
        CHECK(r.ok());
    }
    SUBCASE("equivalent pair reported as not-dedup") {
        Dataflow d;
        d.name = "dup";
        d.tasks = {{"s", {"feed", "source"}},
                   {"a1", {"op", "x"}},
                   {"a2", {"op", "x"}},
                   {"k", {"store", "sink"}}};
        d.streams = {{"s", "a1"}, {"s", "a2"}, {"a1", "k"}, {"a2", "k"}};
        ValidationReport r = validate(d);
        CHECK(!r.ok());
        CHECK(r.has(ViolationKind::NotDedup));
        CHECK(!r.has(ViolationKind::Cycle));
    }
    SUBCASE("source with incoming stream reported as boundary") {
        Dataflow d = fixtures::minimal();
        d.tasks.push_back({"s2", {"feed2", "source"}});
        d.streams.push_back({"out", "s2"});   // also makes the sink non-terminal
        ValidationReport r = validate(d);
        CHECK(r.has(ViolationKind::Boundary));
    }
    SUBCASE("task off every source-sink path") {
        Dataflow d = fixtures::minimal();
        d.tasks.push_back({"stray", {"op", "x"}});
        ValidationReport r = validate(d);
        CHECK(r.has(ViolationKind::Disconnected));
    }
    SUBCASE("duplicate stream") {
        Dataflow d = fixtures::minimal();
        d.streams.push_back({"in", "out"});
        ValidationReport r = validate(d);
        CHECK(r.has(ViolationKind::DuplicateStream));
    }
}

TEST_CASE("serialize/parse round trip") {
    SUBCASE("minimal") {
        Dataflow d = fixtures::minimal();
        Dataflow back = parse_dataflow(serialize_dataflow(d));
        CHECK(structurally_equal(d, back));
    }
    SUBCASE("etl-a") {
        Dataflow d = fixtures::etl_a();
        Dataflow back = parse_dataflow(serialize_dataflow(d));
        CHECK(structurally_equal(d, back));
    }
    SUBCASE("seeded random dataflows") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            WorkloadSpec spec;
            spec.dag_count = 4;
            spec.tasks_min = 2;
            spec.tasks_max = 12;
            spec.source_pool = 3;
            spec.prefix_share = 0.5;
            spec.fan_out_prob = 0.3;
            spec.seed = seed;
            for (const auto& d : generate_workload(spec)) {
                Dataflow back = parse_dataflow(serialize_dataflow(d));
                CHECK(structurally_equal(d, back));
            }
        }
    }
}

TEST_CASE("serialization is canonical") {
    Dataflow d = fixtures::etl_a();
    std::reverse(d.tasks.begin(), d.tasks.end());
    std::reverse(d.streams.begin(), d.streams.end());
    CHECK(serialize_dataflow(d) == serialize_dataflow(fixtures::etl_a()));
}

TEST_CASE("topological order") {
    SUBCASE("valid dataflow has one") {
        auto order = topological_order(fixtures::diamond());
        REQUIRE(order.has_value());
        CHECK(order->size() == 5);
        CHECK(order->front() == "src");
        CHECK(order->back() == "out");
    }
    SUBCASE("cycle has none") {
        Dataflow d = fixtures::minimal();
        d.streams.push_back({"out", "in"});
        CHECK(!topological_order(d).has_value());
    }
}

TEST_CASE("generator output always validates") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        WorkloadSpec spec;
        spec.dag_count = 8;
        spec.tasks_min = 2;
        spec.tasks_max = 16;
        spec.source_pool = 4;
        spec.prefix_share = 0.7;
        spec.fan_out_prob = 0.35;
        spec.seed = seed;
        for (const auto& d : generate_workload(spec)) {
            ValidationReport r = validate(d);
            if (!r.ok()) {
                CAPTURE(d.name);
                CAPTURE(r.violations.front().message);
            }
            CHECK(r.ok());
        }
    }
}
