#include <doctest.h>

#include <algorithm>

#include "reflow/equivalence.hpp"
#include "reflow/harness.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace reflow;

TEST_CASE("parents") {
    Dataflow a = fixtures::etl_a();
    CHECK(parents(a, "kalman") == std::set<std::string>{"parse"});
    CHECK(parents(a, "src").empty());
    CHECK_THROWS_AS(parents(a, "ghost"), UnknownTaskError);

    Dataflow j = fixtures::two_source_join("J", "feedx", "feedy");
    CHECK(parents(j, "join") == std::set<std::string>{"p1", "p2"});
}

TEST_CASE("unknown tasks are rejected") {
    Dataflow a = fixtures::etl_a();
    CHECK_THROWS_AS(ancestor_graph(a, "ghost"), UnknownTaskError);
    CHECK_THROWS_AS(signature(a, "ghost"), UnknownTaskError);
    CHECK_THROWS_AS(tasks_equivalent(a, "src", a, "ghost"), UnknownTaskError);
}

TEST_CASE("ancestor graphs") {
    Dataflow a = fixtures::etl_a();
    SUBCASE("source is its own graph") {
        AncestorGraph g = ancestor_graph(a, "src");
        CHECK(g.tasks.size() == 1);
        CHECK(g.streams.empty());
        CHECK(g.root == "src");
    }
    SUBCASE("the sink graph is the whole dataflow") {
        AncestorGraph g = ancestor_graph(a, "store");
        CHECK(g.tasks.size() == a.tasks.size());
        CHECK(g.streams.size() == a.streams.size());
    }
    SUBCASE("diamond counts the shared ancestor once") {
        AncestorGraph g = ancestor_graph(fixtures::diamond(), "c");
        CHECK(g.tasks.size() == 4);
        CHECK(g.streams.size() == 4);
    }
    SUBCASE("graphs are ancestor-closed and contain a source") {
        WorkloadSpec spec;
        spec.dag_count = 6;
        spec.tasks_max = 14;
        spec.prefix_share = 0.6;
        spec.seed = 7;
        for (const auto& d : generate_workload(spec)) {
            AdjacencyIndex adj(d);
            for (const auto& t : d.tasks) {
                AncestorGraph g = ancestor_graph(d, t.id);
                auto ids = g.task_ids();
                bool closed = true, has_source = false;
                for (const auto& id : ids) {
                    for (const auto& p : adj.parents(id))
                        if (!ids.count(p)) closed = false;
                    if (d.task_at(id).is_source()) has_source = true;
                }
                CHECK(closed);
                CHECK(has_source);
            }
        }
    }
}

TEST_CASE("signatures") {
    Dataflow a = fixtures::etl_a();
    Dataflow b = fixtures::etl_b();
    Dataflow d = fixtures::etl_d();

    SUBCASE("source signature depends only on type") {
        CHECK(signature(a, "src") == signature(b, "src"));
        CHECK(signature(a, "src") != signature(d, "src"));
    }
    SUBCASE("deterministic recomputation") {
        CHECK(signature(a, "annotate") == signature(a, "annotate"));
    }
    SUBCASE("shared prefix matches, tails differ") {
        CHECK(signature(a, "kalman") == signature(b, "kalman"));
        CHECK(signature(a, "annotate") != signature(b, "window"));
    }
    SUBCASE("same abstract under different source differs") {
        CHECK(signature(a, "kalman") != signature(d, "kalman"));
    }
}

TEST_CASE("task equivalence") {
    Dataflow a = fixtures::etl_a();
    Dataflow b = fixtures::etl_b();
    Dataflow d = fixtures::etl_d();

    CHECK(tasks_equivalent(a, "kalman", a, "kalman"));
    CHECK(tasks_equivalent(a, "kalman", b, "kalman"));
    CHECK(!tasks_equivalent(a, "kalman", d, "kalman"));

    SUBCASE("extra upstream ancestor breaks equivalence") {
        // Same tail abstract, one side has an extra stage before it.
        Dataflow p = fixtures::linear("P", "feed", {{"op", "x"}, {"tail", "t"}});
        Dataflow q = fixtures::linear("Q", "feed", {{"op", "x"}, {"extra", "e"}, {"tail", "t"}});
        CHECK(!tasks_equivalent(p, "n1", q, "n2"));
        CHECK(testutil::brute_force_equivalent(p, "n1", q, "n2") == false);
    }
}

TEST_CASE("maximal ancestor set") {
    CHECK(maximal_ancestor_set({}).empty());

    Dataflow a = fixtures::etl_a();
    SUBCASE("single-sink dataflow keeps only the sink graph") {
        std::vector<AncestorGraph> all;
        for (const auto& t : a.tasks) all.push_back(ancestor_graph(a, t.id));
        auto maximal = maximal_ancestor_set(all);
        REQUIRE(maximal.size() == 1);
        CHECK(maximal.front().root == "store");
    }
    SUBCASE("descendant graph absorbs the prefix graph") {
        auto maximal = maximal_ancestor_set(
            {ancestor_graph(a, "parse"), ancestor_graph(a, "kalman")});
        REQUIRE(maximal.size() == 1);
        CHECK(maximal.front().root == "kalman");
    }
    SUBCASE("maximal set size equals sink count") {
        WorkloadSpec spec;
        spec.dag_count = 8;
        spec.tasks_max = 12;
        spec.fan_out_prob = 0.6;   // encourages two-sink DAGs
        spec.seed = 99;
        for (const auto& d : generate_workload(spec)) {
            std::vector<AncestorGraph> all;
            for (const auto& t : d.tasks) all.push_back(ancestor_graph(d, t.id));
            CHECK(maximal_ancestor_set(all).size() == d.sink_ids().size());
        }
    }
}

TEST_CASE("ancestor intersection") {
    Dataflow a = fixtures::etl_a();
    Dataflow b = fixtures::etl_b();
    Dataflow d = fixtures::etl_d();

    SUBCASE("disjoint pair yields empty set") {
        CHECK(ancestor_intersection(a, d).empty());
    }
    SUBCASE("dataflow against itself covers every task") {
        CHECK(ancestor_intersection(a, a).size() == a.tasks.size());
    }
    SUBCASE("A vs B shares the three prefix tasks") {
        auto shared = ancestor_intersection(a, b);
        REQUIRE(shared.size() == 3);
        std::set<std::string> roots;
        for (const auto& g : shared) roots.insert(g.root);
        CHECK(roots == std::set<std::string>{"src", "parse", "kalman"});
    }
    SUBCASE("members come from the first dataflow") {
        for (const auto& g : ancestor_intersection(b, a)) CHECK(b.has_task(g.root));
    }
}

TEST_CASE("maximal ancestor intersection") {
    Dataflow a = fixtures::etl_a();
    Dataflow b = fixtures::etl_b();
    Dataflow d = fixtures::etl_d();

    SUBCASE("A vs B reduces to the kalman-rooted graph") {
        auto maximal = maximal_ancestor_intersection(a, b);
        REQUIRE(maximal.size() == 1);
        CHECK(maximal.front().root == "kalman");
        CHECK(maximal.front().tasks.size() == 3);
    }
    SUBCASE("disjoint pair") {
        CHECK(maximal_ancestor_intersection(a, d).empty());
    }
    SUBCASE("two independent shared sources give two maximal graphs") {
        Dataflow j1 = fixtures::two_source_join("J1", "feedx", "feedy");
        // Same two prefixes, different correlation config downstream.
        Dataflow j2 = fixtures::two_source_join("J2", "feedx", "feedy");
        for (auto& t : j2.tasks)
            if (t.id == "join") t.abstract.config = "w=9";
        auto maximal = maximal_ancestor_intersection(j1, j2);
        CHECK(maximal.size() == 2);
        // Oracle: exhaustive pairwise equivalence marks exactly p1/p2 (and
        // sources) shared, join and sink not shared.
        CHECK(testutil::brute_force_equivalent(j1, "p1", j2, "p1"));
        CHECK(!testutil::brute_force_equivalent(j1, "join", j2, "join"));
    }
}

TEST_CASE("disjointness") {
    Dataflow a = fixtures::etl_a();
    Dataflow b = fixtures::etl_b();
    Dataflow d = fixtures::etl_d();
    CHECK(dags_disjoint(a, d));
    CHECK(!dags_disjoint(a, b));
    CHECK(!dags_disjoint(a, a));
    SUBCASE("agrees with the ancestor intersection") {
        CHECK(ancestor_intersection(a, d).empty() == dags_disjoint(a, d));
        CHECK(ancestor_intersection(a, b).empty() == dags_disjoint(a, b));
    }
}

TEST_CASE("equivalence is an equivalence relation on generated pairs") {
    WorkloadSpec spec;
    spec.dag_count = 6;
    spec.tasks_max = 10;
    spec.prefix_share = 0.8;
    spec.source_pool = 2;
    spec.seed = 5;
    auto workload = generate_workload(spec);

    std::vector<std::pair<const Dataflow*, std::string>> all;
    for (const auto& d : workload)
        for (const auto& t : d.tasks) all.emplace_back(&d, t.id);

    // Reflexive on everything; symmetric and transitive over the sample.
    for (const auto& [d, id] : all) CHECK(tasks_equivalent(*d, id, *d, id));

    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto& [d1, t1] = all[rng.below(all.size())];
        const auto& [d2, t2] = all[rng.below(all.size())];
        const auto& [d3, t3] = all[rng.below(all.size())];
        bool ab = tasks_equivalent(*d1, t1, *d2, t2);
        CHECK(ab == tasks_equivalent(*d2, t2, *d1, t1));
        if (ab && tasks_equivalent(*d2, t2, *d3, t3)) CHECK(tasks_equivalent(*d1, t1, *d3, t3));
    }
}

TEST_CASE("signature-based equivalence agrees with brute force") {
    WorkloadSpec spec;
    spec.dag_count = 5;
    spec.tasks_min = 2;
    spec.tasks_max = 12;
    spec.prefix_share = 0.75;
    spec.source_pool = 2;
    spec.fan_out_prob = 0.4;

    for (std::uint64_t seed = 40; seed < 48; ++seed) {
        spec.seed = seed;
        auto workload = generate_workload(spec);
        for (std::size_t i = 0; i < workload.size(); ++i)
            for (std::size_t j = i; j < workload.size(); ++j) {
                SignatureIndex si(workload[i]);
                SignatureIndex sj(workload[j]);
                EquivalenceMatcher m(si, sj);
                for (const auto& t1 : workload[i].tasks)
                    for (const auto& t2 : workload[j].tasks) {
                        bool fast = m.equivalent(t1.id, t2.id);
                        bool slow = testutil::brute_force_equivalent(workload[i], t1.id,
                                                                     workload[j], t2.id);
                        if (fast != slow) {
                            CAPTURE(workload[i].name);
                            CAPTURE(t1.id);
                            CAPTURE(workload[j].name);
                            CAPTURE(t2.id);
                        }
                        CHECK(fast == slow);
                    }
            }
    }
}
