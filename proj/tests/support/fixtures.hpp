// Shared fixtures: four ETL/STATS dataflows with a common urban-sensing
// prefix (A, B, C) and a power-meter sibling (D), plus small hand-built
// shapes used across suites.
#ifndef REFLOW_TESTS_FIXTURES_HPP
#define REFLOW_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reflow/dataflow.hpp"
#include "reflow/json_io.hpp"

#ifndef REFLOW_FIXTURE_DIR
#define REFLOW_FIXTURE_DIR "tests/fixtures"
#endif

namespace fixtures {

inline std::string fixture_path(const std::string& name) {
    return std::string(REFLOW_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline reflow::Dataflow load(const std::string& name) {
    return reflow::parse_dataflow(read_fixture(name));
}

inline reflow::Dataflow etl_a() { return load("etl-a.json"); }
inline reflow::Dataflow etl_b() { return load("etl-b.json"); }
inline reflow::Dataflow etl_c() { return load("etl-c.json"); }
inline reflow::Dataflow etl_d() { return load("etl-d.json"); }

inline reflow::Dataflow minimal(const std::string& name = "mini") {
    reflow::Dataflow d;
    d.name = name;
    d.tasks = {{"in", {"feed", "source"}}, {"out", {"store", "sink"}}};
    d.streams = {{"in", "out"}};
    return d;
}

// src -> a, src -> b, a -> c, b -> c, c -> sink
inline reflow::Dataflow diamond(const std::string& name = "diamond") {
    reflow::Dataflow d;
    d.name = name;
    d.tasks = {{"src", {"feed", "source"}},
               {"a", {"op-a", "p=1"}},
               {"b", {"op-b", "p=2"}},
               {"c", {"join", "p=3"}},
               {"out", {"store", "sink"}}};
    d.streams = {{"src", "a"}, {"src", "b"}, {"a", "c"}, {"b", "c"}, {"c", "out"}};
    return d;
}

// Two independent raw streams joined into one sink.
inline reflow::Dataflow two_source_join(const std::string& name, const std::string& src1,
                                        const std::string& src2) {
    reflow::Dataflow d;
    d.name = name;
    d.tasks = {{"s1", {src1, "source"}},    {"s2", {src2, "source"}},
               {"p1", {"clean", "v=1"}},    {"p2", {"clean", "v=2"}},
               {"join", {"correlate", "w=4"}}, {"out", {"store", "sink"}}};
    d.streams = {{"s1", "p1"}, {"s2", "p2"}, {"p1", "join"}, {"p2", "join"}, {"join", "out"}};
    return d;
}

// Straight pipeline: source, the given (type, config) stages, one sink.
inline reflow::Dataflow linear(const std::string& name, const std::string& source_type,
                               const std::vector<std::pair<std::string, std::string>>& stages,
                               const std::string& sink_type = "store") {
    reflow::Dataflow d;
    d.name = name;
    d.tasks.push_back({"src", {source_type, "source"}});
    std::string prev = "src";
    for (std::size_t i = 0; i < stages.size(); ++i) {
        std::string id = "n" + std::to_string(i);
        d.tasks.push_back({id, {stages[i].first, stages[i].second}});
        d.streams.push_back({prev, id});
        prev = id;
    }
    d.tasks.push_back({"out", {sink_type, "sink"}});
    d.streams.push_back({prev, "out"});
    return d;
}

} // namespace fixtures

#endif // REFLOW_TESTS_FIXTURES_HPP
