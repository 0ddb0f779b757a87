#include <doctest.h>

#include <sstream>

#include "reflow/harness.hpp"
#include "support/fixtures.hpp"

using namespace reflow;

TEST_CASE("workload spec validation") {
    WorkloadSpec s;
    s.dag_count = 0;
    CHECK_THROWS_AS(generate_workload(s), SpecError);
    s = WorkloadSpec{};
    s.tasks_min = 1;
    CHECK_THROWS_AS(generate_workload(s), SpecError);
    s = WorkloadSpec{};
    s.prefix_share = 1.5;
    CHECK_THROWS_AS(generate_workload(s), SpecError);
}

TEST_CASE("workload generation") {
    SUBCASE("seed-deterministic") {
        WorkloadSpec s;
        s.dag_count = 6;
        s.seed = 12;
        auto w1 = generate_workload(s);
        auto w2 = generate_workload(s);
        REQUIRE(w1.size() == w2.size());
        for (std::size_t i = 0; i < w1.size(); ++i)
            CHECK(structurally_equal(w1[i], w2[i]));
    }
    SUBCASE("sizes stay within the configured range") {
        WorkloadSpec s;
        s.dag_count = 20;
        s.tasks_min = 3;
        s.tasks_max = 9;
        s.seed = 3;
        for (const auto& d : generate_workload(s)) {
            CHECK(d.tasks.size() >= 3);
            CHECK(d.tasks.size() <= 9);
        }
    }
    SUBCASE("zero prefix share with a wide source pool is pairwise disjoint") {
        WorkloadSpec s;
        s.dag_count = 8;
        s.source_pool = 8;
        s.prefix_share = 0.0;
        s.seed = 21;
        auto w = generate_workload(s);
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j < w.size(); ++j) CHECK(dags_disjoint(w[i], w[j]));
    }
    SUBCASE("full prefix share over one raw stream overlaps everywhere") {
        WorkloadSpec s;
        s.dag_count = 8;
        s.source_pool = 1;
        s.prefix_share = 1.0;
        s.seed = 22;
        auto w = generate_workload(s);
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j < w.size(); ++j) CHECK(!dags_disjoint(w[i], w[j]));
    }
}

TEST_CASE("trace generation") {
    WorkloadSpec s;
    s.dag_count = 35;
    s.tasks_max = 6;
    s.seed = 9;
    auto workload = generate_workload(s);

    SUBCASE("SEQ emits 2N actions, submits before removes") {
        Trace t = generate_trace(workload, Trace::Kind::Seq, 4);
        CHECK(t.actions.size() == 70);
        for (std::size_t i = 0; i < 35; ++i) CHECK(t.actions[i].op == TraceAction::Op::Submit);
        for (std::size_t i = 35; i < 70; ++i) CHECK(t.actions[i].op == TraceAction::Op::Remove);
    }
    SUBCASE("RW fills, walks, then drains") {
        Trace t = generate_trace(workload, Trace::Kind::Rw, 4, 100, 20.0 / 35.0);
        std::size_t submits = 0, removes = 0;
        for (std::size_t i = 0; i < 20; ++i) CHECK(t.actions[i].op == TraceAction::Op::Submit);
        for (const auto& a : t.actions)
            (a.op == TraceAction::Op::Submit ? submits : removes)++;
        CHECK(submits == removes);   // drained back to empty
        CHECK(t.actions.size() >= 120);
    }
    SUBCASE("same seed, same trace") {
        Trace t1 = generate_trace(workload, Trace::Kind::Rw, 17, 50, 0.5);
        Trace t2 = generate_trace(workload, Trace::Kind::Rw, 17, 50, 0.5);
        REQUIRE(t1.actions.size() == t2.actions.size());
        for (std::size_t i = 0; i < t1.actions.size(); ++i) {
            CHECK(t1.actions[i].name == t2.actions[i].name);
            CHECK(t1.actions[i].op == t2.actions[i].op);
        }
    }
    SUBCASE("trace JSON round trip and validation") {
        Trace t = generate_trace(workload, Trace::Kind::Rw, 3, 40, 0.5);
        Trace back = trace_from_json(trace_to_json(t));
        REQUIRE(back.actions.size() == t.actions.size());
        CHECK(back.kind == t.kind);

        nlohmann::json bad = {{"kind", "seq"},
                              {"actions", {{{"step", 0}, {"op", "remove"}, {"name", "x"}}}}};
        CHECK_THROWS_AS(trace_from_json(bad), ParseError);
    }
}

TEST_CASE("replay modes agree with their defining counts") {
    WorkloadSpec s;
    s.dag_count = 10;
    s.tasks_max = 8;
    s.prefix_share = 0.7;
    s.source_pool = 3;
    s.seed = 31;
    auto workload = generate_workload(s);
    std::size_t total_tasks = 0;
    for (const auto& d : workload) total_tasks += d.tasks.size();
    Trace trace = generate_trace(workload, Trace::Kind::Seq, 5);

    ReplayOptions options;
    options.events_per_step = 3;
    options.check_minimality = true;
    auto def = replay(workload, trace, ReplayMode::Default, options);
    auto reuse = replay(workload, trace, ReplayMode::Reuse, options);
    REQUIRE(def.samples.size() == trace.actions.size());
    REQUIRE(reuse.samples.size() == trace.actions.size());

    SUBCASE("default peaks at the plain task sum") {
        CHECK(def.samples[workload.size() - 1].running_tasks == total_tasks);
    }
    SUBCASE("reuse stays at or below default and both drain to zero") {
        for (std::size_t i = 0; i < def.samples.size(); ++i)
            CHECK(reuse.samples[i].running_tasks <= def.samples[i].running_tasks);
        CHECK(def.samples.back().running_tasks == 0);
        CHECK(reuse.samples.back().running_tasks == 0);
        CHECK(reuse.samples.back().fragments >= 1);   // fragments persist, paused
    }
    SUBCASE("replays are reproducible") {
        auto reuse2 = replay(workload, trace, ReplayMode::Reuse, options);
        std::ostringstream a, b;
        write_metrics_csv(a, {&reuse});
        write_metrics_csv(b, {&reuse2});
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("reuse histogram") {
    SUBCASE("disjoint workload reports nothing above usage one") {
        WorkloadSpec s;
        s.dag_count = 5;
        s.source_pool = 5;
        s.prefix_share = 0.0;
        s.seed = 41;
        auto workload = generate_workload(s);
        Trace trace = generate_trace(workload, Trace::Kind::Seq, 2);
        ReplayOptions options;
        options.simulate = false;
        auto result = replay(workload, trace, ReplayMode::Reuse, options);
        CHECK(reuse_histogram(result).empty());
    }
    SUBCASE("two identical dataflows alive the whole trace sit in bucket [2,3)") {
        Dataflow a = fixtures::etl_a();
        Dataflow a2 = fixtures::etl_a();
        a2.name = "A2";
        Trace trace;
        trace.actions = {{0, TraceAction::Op::Submit, "A"},
                         {0, TraceAction::Op::Submit, "A2"},
                         {1, TraceAction::Op::Remove, "A"},
                         {1, TraceAction::Op::Remove, "A2"}};
        ReplayOptions options;
        options.simulate = false;
        auto result = replay({a, a2}, trace, ReplayMode::Reuse, options);
        REQUIRE(result.samples.size() == 2);
        auto hist = reuse_histogram(result);
        REQUIRE(hist.count(2) == 1);
        CHECK(hist.at(2) == doctest::Approx(1.0));
    }
}

TEST_CASE("savings grow with prefix share") {
    auto mean_savings = [](double prefix_share) {
        double total = 0.0;
        int n = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            WorkloadSpec s;
            s.dag_count = 10;
            s.tasks_min = 3;
            s.tasks_max = 10;
            s.source_pool = 2;
            s.prefix_share = prefix_share;
            s.seed = seed * 1000 + 17;
            auto workload = generate_workload(s);
            Trace trace = generate_trace(workload, Trace::Kind::Seq, seed);
            ReplayOptions options;
            options.simulate = false;
            options.oracle_every = 0;
            auto def = replay(workload, trace, ReplayMode::Default, options);
            auto reuse = replay(workload, trace, ReplayMode::Reuse, options);
            double sum_def = 0.0, sum_reuse = 0.0;
            for (std::size_t i = 0; i < def.samples.size(); ++i) {
                sum_def += static_cast<double>(def.samples[i].running_tasks);
                sum_reuse += static_cast<double>(reuse.samples[i].running_tasks);
            }
            total += 1.0 - sum_reuse / sum_def;
            ++n;
        }
        return total / n;
    };

    double s0 = mean_savings(0.0);
    double s1 = mean_savings(0.5);
    double s2 = mean_savings(0.95);
    CHECK(s0 <= s1);
    CHECK(s1 <= s2);
    CHECK(s2 > 0.10);
}

TEST_CASE("workload JSON round trip") {
    WorkloadSpec s;
    s.dag_count = 4;
    s.seed = 8;
    auto workload = generate_workload(s);
    auto j = workload_to_json(workload, &s);
    auto back = workload_from_json(j);
    REQUIRE(back.size() == workload.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(structurally_equal(back[i], workload[i]));
    WorkloadSpec spec_back = workload_spec_from_json(j.at("spec"));
    CHECK(spec_back.seed == s.seed);
    CHECK(spec_back.dag_count == s.dag_count);
}

TEST_CASE("metrics CSV shape") {
    WorkloadSpec s;
    s.dag_count = 3;
    s.tasks_max = 5;
    s.seed = 2;
    auto workload = generate_workload(s);
    Trace trace = generate_trace(workload, Trace::Kind::Seq, 2);
    ReplayOptions options;
    options.events_per_step = 1;
    auto def = replay(workload, trace, ReplayMode::Default, options);
    auto reuse = replay(workload, trace, ReplayMode::Reuse, options);
    std::ostringstream os;
    write_metrics_csv(os, {&def, &reuse});
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "step,mode,running_tasks,cost,fragments,paused");
    std::size_t rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == def.samples.size() + reuse.samples.size());
}
