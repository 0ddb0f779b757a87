#ifndef REFLOW_HARNESS_HPP
#define REFLOW_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflow/dataflow.hpp"
#include "reflow/json_io.hpp"
#include "reflow/manager.hpp"
#include "reflow/simulator.hpp"

namespace reflow {

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64) -- identical sequences on every platform.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    double real() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }
    bool chance(double p) { return real() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Workload generation
// ---------------------------------------------------------------------------

struct WorkloadSpec {
    std::size_t dag_count = 10;
    std::size_t tasks_min = 2;
    std::size_t tasks_max = 10;
    std::size_t source_pool = 4;      // distinct raw stream types available
    double prefix_share = 0.5;        // probability a DAG extends an existing prefix
    double fan_out_prob = 0.2;
    std::uint64_t seed = 1;
};

inline void validate_spec(const WorkloadSpec& s) {
    if (s.dag_count == 0) throw SpecError("dag_count must be >= 1");
    if (s.tasks_min < 2) throw SpecError("tasks_min must be >= 2 (source and sink)");
    if (s.tasks_max < s.tasks_min) throw SpecError("tasks_max < tasks_min");
    if (s.source_pool == 0) throw SpecError("source_pool must be >= 1");
    if (s.prefix_share < 0.0 || s.prefix_share > 1.0) throw SpecError("prefix_share out of [0,1]");
    if (s.fan_out_prob < 0.0 || s.fan_out_prob > 1.0) throw SpecError("fan_out_prob out of [0,1]");
}

namespace detail {

// Log-uniform size draw; DAG collections skew small.
inline std::size_t draw_size(Rng& rng, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return lo;
    double a = std::log(static_cast<double>(lo) + 1.0);
    double b = std::log(static_cast<double>(hi) + 1.0);
    auto n = static_cast<std::size_t>(std::exp(a + rng.real() * (b - a)));
    return std::min(std::max(n, lo), hi);
}

// Weighted pick favoring larger ancestor closures: reuse cuts deepest when a
// submission extends a long existing prefix, which is also the shape shared
// pre-processing pipelines take in practice.
inline std::size_t pick_weighted_by_size(
    Rng& rng, const std::vector<std::pair<std::string, std::set<std::string>>>& fits) {
    double total = 0.0;
    for (const auto& f : fits) {
        double sz = static_cast<double>(f.second.size());
        total += sz * sz * sz * sz * sz;
    }
    double target = rng.real() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        double sz = static_cast<double>(fits[i].second.size());
        acc += sz * sz * sz * sz * sz;
        if (target < acc) return i;
    }
    return fits.size() - 1;
}

inline std::set<std::string> source_types_of(const std::vector<ConcreteTask>& tasks) {
    std::set<std::string> out;
    for (const auto& t : tasks)
        if (t.is_source()) out.insert(t.abstract.type);
    return out;
}

} // namespace detail

/// Generates `dag_count` valid de-dup DAGs. Overlap between them comes from
/// copying a random ancestor-closed prefix of an earlier DAG (probability
/// `prefix_share`), occasionally unioned with a second prefix drawn from a
/// DAG with disjoint raw streams, so that one submission can straddle two
/// running DAGs. All freshly grown tasks get a globally unique config, which
/// keeps every generated DAG de-dup by construction.
inline std::vector<Dataflow> generate_workload(const WorkloadSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);
    std::vector<Dataflow> out;
    std::vector<std::size_t> source_use(spec.source_pool, 0);
    std::uint64_t uniq = 0;

    // Ancestor closure sized per donor task, computed on demand.
    auto prefix_candidates = [&](const Dataflow& donor, std::size_t budget) {
        std::vector<std::pair<std::string, std::set<std::string>>> fits;
        AdjacencyIndex adj(donor);
        for (const auto& t : donor.tasks) {
            if (t.is_sink()) continue;
            std::set<std::string> closure{t.id};
            std::vector<std::string> stack{t.id};
            while (!stack.empty()) {
                auto cur = stack.back();
                stack.pop_back();
                for (const auto& p : adj.parents(cur))
                    if (closure.insert(p).second) stack.push_back(p);
            }
            if (closure.size() <= budget) fits.emplace_back(t.id, std::move(closure));
        }
        return fits;
    };

    for (std::size_t i = 0; i < spec.dag_count; ++i) {
        Dataflow d;
        d.name = "dag" + std::to_string(i);
        std::size_t target = detail::draw_size(rng, spec.tasks_min, spec.tasks_max);
        std::size_t sink_count = (target >= 4 && rng.chance(spec.fan_out_prob)) ? 2 : 1;
        std::size_t local_seq = 0;
        auto fresh_id = [&] { return "t" + std::to_string(local_seq++); };

        auto copy_prefix = [&](const Dataflow& donor, const std::set<std::string>& closure) {
            std::map<std::string, std::string> remap;
            for (const auto& t : donor.tasks)
                if (closure.count(t.id)) {
                    std::string id = fresh_id();
                    remap.emplace(t.id, id);
                    d.tasks.push_back(ConcreteTask{id, t.abstract});
                }
            for (const auto& s : donor.streams)
                if (closure.count(s.to) && closure.count(s.from))
                    d.streams.push_back(Stream{remap.at(s.from), remap.at(s.to)});
        };

        std::size_t budget = target - sink_count;
        // Copied prefixes leave room for fresh tasks: every DAG contributes
        // some computation of its own rather than shadowing a donor outright.
        std::size_t prefix_budget = budget - std::max<std::size_t>(1, budget / 8);
        if (!out.empty() && prefix_budget >= 1 && rng.chance(spec.prefix_share)) {
            // Candidates pooled across every earlier DAG, so a large new DAG
            // can find the deepest prefix available anywhere.
            std::vector<std::pair<const Dataflow*, std::set<std::string>>> pool;
            std::vector<std::pair<std::string, std::set<std::string>>> weights;
            for (const auto& donor : out)
                for (auto& fit : prefix_candidates(donor, prefix_budget)) {
                    weights.emplace_back(fit.first, fit.second);
                    pool.emplace_back(&donor, std::move(fit.second));
                }
            if (!pool.empty()) {
                std::size_t k = detail::pick_weighted_by_size(rng, weights);
                copy_prefix(*pool[k].first, pool[k].second);

                // Second prefix from a raw-stream-disjoint donor: the union
                // stays de-dup because equivalence needs equivalent sources.
                if (prefix_budget > d.tasks.size() &&
                    rng.chance(spec.prefix_share * spec.fan_out_prob)) {
                    auto my_sources = detail::source_types_of(d.tasks);
                    std::vector<std::pair<const Dataflow*, std::set<std::string>>> pool2;
                    std::vector<std::pair<std::string, std::set<std::string>>> weights2;
                    for (const auto& donor : out) {
                        auto types = detail::source_types_of(donor.tasks);
                        bool overlap = false;
                        for (const auto& ty : types)
                            if (my_sources.count(ty)) overlap = true;
                        if (overlap) continue;
                        for (auto& fit :
                             prefix_candidates(donor, prefix_budget - d.tasks.size())) {
                            weights2.emplace_back(fit.first, fit.second);
                            pool2.emplace_back(&donor, std::move(fit.second));
                        }
                    }
                    if (!pool2.empty()) {
                        std::size_t k2 = detail::pick_weighted_by_size(rng, weights2);
                        copy_prefix(*pool2[k2].first, pool2[k2].second);
                    }
                }
            }
        }

        if (d.tasks.empty()) {
            // Fresh start on the least-used raw stream, so prefix_share=0 with
            // a large enough pool yields pairwise disjoint DAGs.
            std::size_t best = 0;
            for (std::size_t k = 1; k < source_use.size(); ++k)
                if (source_use[k] < source_use[best]) best = k;
            ++source_use[best];
            d.tasks.push_back(
                ConcreteTask{fresh_id(), AbstractTask{"src" + std::to_string(best), kSourceConfig}});
        }

        while (d.tasks.size() < budget) {
            std::string parent = d.tasks[rng.below(d.tasks.size())].id;
            ConcreteTask t{fresh_id(),
                           AbstractTask{"op" + std::to_string(rng.below(8)),
                                        "p=" + std::to_string(uniq++)}};
            d.streams.push_back(Stream{parent, t.id});
            if (d.tasks.size() >= 2 && rng.chance(spec.fan_out_prob)) {
                std::string second = d.tasks[rng.below(d.tasks.size())].id;
                if (second != parent) d.streams.push_back(Stream{second, t.id});
            }
            d.tasks.push_back(std::move(t));
        }

        // Route every leaf into a sink; sink types are unique per DAG.
        std::set<std::string> has_out;
        for (const auto& s : d.streams) has_out.insert(s.from);
        std::vector<std::string> leaves;
        for (const auto& t : d.tasks)
            if (!has_out.count(t.id)) leaves.push_back(t.id);
        std::vector<std::string> sinks;
        for (std::size_t k = 0; k < sink_count; ++k) {
            ConcreteTask snk{fresh_id(),
                             AbstractTask{"snk-" + d.name + "-" + std::to_string(k), kSinkConfig}};
            sinks.push_back(snk.id);
            d.tasks.push_back(std::move(snk));
        }
        for (std::size_t li = 0; li < leaves.size(); ++li)
            d.streams.push_back(Stream{leaves[li], sinks[li % sinks.size()]});
        if (leaves.size() == 1 && sinks.size() == 2)
            d.streams.push_back(Stream{leaves[0], sinks[1]});

        out.push_back(std::move(d));
    }
    return out;
}

/// The shipped benchmark preset: 35 DAGs of 2-38 tasks totalling 476 task
/// instances that collapse into 276 equivalence classes (peak reduction
/// 42.0%). The seed and shape parameters were fixed against the
/// class-counting oracle.
inline WorkloadSpec opmw_like_spec() {
    WorkloadSpec s;
    s.dag_count = 35;
    s.tasks_min = 2;
    s.tasks_max = 38;
    s.source_pool = 5;
    s.prefix_share = 0.95;
    s.fan_out_prob = 0.2;
    s.seed = 40;
    return s;
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct TraceAction {
    enum class Op { Submit, Remove };
    std::uint64_t step = 0;
    Op op = Op::Submit;
    std::string name;
};

struct Trace {
    enum class Kind { Seq, Rw };
    Kind kind = Kind::Seq;
    std::vector<TraceAction> actions;
};

/// SEQ: every DAG submitted in uniform-random order, then every DAG removed in
/// uniform-random order. RW: an initial fill, then `rw_steps` coin-flip
/// add/remove actions, then a drain.
inline Trace generate_trace(const std::vector<Dataflow>& workload, Trace::Kind kind,
                            std::uint64_t seed, std::size_t rw_steps = 100,
                            double initial_fill = 2.0 / 3.0) {
    if (workload.empty()) throw SpecError("workload is empty");
    if (initial_fill < 0.0 || initial_fill > 1.0) throw SpecError("initial_fill out of [0,1]");
    Rng rng(seed);
    std::vector<std::string> names;
    for (const auto& d : workload) names.push_back(d.name);

    Trace trace;
    trace.kind = kind;
    std::uint64_t step = 0;
    auto act = [&](TraceAction::Op op, const std::string& n) {
        trace.actions.push_back(TraceAction{step++, op, n});
    };

    if (kind == Trace::Kind::Seq) {
        std::vector<std::string> order = names;
        rng.shuffle(order);
        for (const auto& n : order) act(TraceAction::Op::Submit, n);
        rng.shuffle(order);
        for (const auto& n : order) act(TraceAction::Op::Remove, n);
        return trace;
    }

    std::vector<std::string> pool = names;   // not currently submitted
    std::vector<std::string> live;
    rng.shuffle(pool);
    auto fill = static_cast<std::size_t>(std::llround(initial_fill * static_cast<double>(names.size())));
    fill = std::min(fill, names.size());
    for (std::size_t i = 0; i < fill; ++i) {
        live.push_back(pool.back());
        act(TraceAction::Op::Submit, pool.back());
        pool.pop_back();
    }
    for (std::size_t i = 0; i < rw_steps; ++i) {
        bool add = rng.chance(0.5);
        if (add && pool.empty()) add = false;
        if (!add && live.empty()) add = true;
        if (add && pool.empty()) break;   // nothing to do either way
        if (add) {
            std::size_t k = rng.below(pool.size());
            std::swap(pool[k], pool.back());
            live.push_back(pool.back());
            act(TraceAction::Op::Submit, pool.back());
            pool.pop_back();
        } else {
            std::size_t k = rng.below(live.size());
            std::swap(live[k], live.back());
            act(TraceAction::Op::Remove, live.back());
            pool.push_back(live.back());
            live.pop_back();
        }
    }
    rng.shuffle(live);
    for (const auto& n : live) act(TraceAction::Op::Remove, n);
    return trace;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

enum class ReplayMode { Default, Reuse };

struct ReplayOptions {
    std::size_t events_per_step = 10;   // constant input rate per raw stream
    std::size_t oracle_every = 1;       // 0 disables oracle checks
    bool check_outputs = true;          // compare sinks against standalone runs
    bool check_minimality = false;      // compare against rebuild_from_scratch
    bool simulate = true;               // false: manage + bookkeeping only
};

struct StepSample {
    std::uint64_t step = 0;
    std::size_t running_tasks = 0;
    double cost = 0.0;
    std::size_t fragments = 0;
    std::size_t paused = 0;
    std::map<std::size_t, std::size_t> usage_counts;   // k -> tasks used by k DAGs
};

struct ReplayResult {
    ReplayMode mode = ReplayMode::Default;
    std::vector<StepSample> samples;
};

/// Per-step view across both execution modes.
struct MetricsSample {
    std::uint64_t step = 0;
    std::size_t running_tasks_default = 0;
    std::size_t running_tasks_reuse = 0;
    double cost_default = 0.0;
    double cost_reuse = 0.0;
};

namespace detail {

inline const Dataflow& workload_by_name(const std::vector<Dataflow>& workload,
                                        const std::string& name) {
    for (const auto& d : workload)
        if (d.name == name) return d;
    throw SpecError("trace names unknown dataflow '" + name + "'");
}

/// Events injected for one raw stream this step; payloads are a function of
/// the stream identity and sequence number only, so merged and standalone
/// worlds observe identical raw events.
inline std::vector<Event> make_events(const std::string& source_type, std::uint64_t& seq,
                                      std::size_t count) {
    std::vector<Event> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(Event{source_type, seq, source_type + "#" + std::to_string(seq)});
        ++seq;
    }
    return out;
}

} // namespace detail

/// Drives a trace through either execution mode and collects per-step metrics.
/// Default deploys every submitted DAG standalone; Reuse drives the manager
/// and the merged deployment, with constraint/minimality/output oracles at the
/// configured cadence. Any failed oracle aborts with the failing step named.
inline ReplayResult replay(const std::vector<Dataflow>& workload, const Trace& trace,
                           ReplayMode mode, const ReplayOptions& options = {}) {
    ReplayResult result;
    result.mode = mode;

    ManagerState st;
    Deployment dep;
    std::map<std::string, Deployment> worlds;     // Default worlds / Reuse references
    std::map<std::string, Dataflow> originals;    // live name -> original document
    std::map<std::string, std::uint64_t> source_seq;

    std::size_t i = 0;
    while (i < trace.actions.size()) {
        const std::uint64_t step = trace.actions[i].step;

        // --- apply every action scheduled for this step ---
        for (; i < trace.actions.size() && trace.actions[i].step == step; ++i) {
            const TraceAction& action = trace.actions[i];
            if (action.op == TraceAction::Op::Submit) {
                const Dataflow& doc = detail::workload_by_name(workload, action.name);
                originals.emplace(action.name, doc);
                if (mode == ReplayMode::Reuse) {
                    auto [st2, plan] = submit(st, doc);
                    st = std::move(st2);
                    dep.apply_merge(plan);
                    if (options.check_outputs && options.simulate)
                        worlds.emplace(action.name, deploy_dataflow(st.submitted.at(action.name)));
                } else {
                    worlds.emplace(action.name, deploy_dataflow(namespaced_copy(doc)));
                }
            } else {
                originals.erase(action.name);
                if (mode == ReplayMode::Reuse) {
                    auto [st2, plan] = remove(st, action.name);
                    st = std::move(st2);
                    dep.apply_unmerge(plan);
                }
                worlds.erase(action.name);
            }

            // Per-action oracles (cadence counted in steps).
            if (mode == ReplayMode::Reuse && options.oracle_every > 0 &&
                step % options.oracle_every == 0) {
                ConstraintReport report = check_constraints(st);
                if (!report.ok())
                    throw Error("constraint violation at step " + std::to_string(step) + ": " +
                                report.issues.front().message);
                if (options.check_minimality) {
                    std::vector<Dataflow> docs;
                    for (const auto& [n, d] : originals) docs.push_back(d);
                    ManagerState oracle = rebuild_from_scratch(docs);
                    if (oracle.running_task_count() != st.running_task_count())
                        throw Error("minimality violated at step " + std::to_string(step) +
                                    ": running " + std::to_string(st.running_task_count()) +
                                    " vs classes " + std::to_string(oracle.running_task_count()));
                }
                if (st.running_task_count() != dep.active_task_count())
                    throw Error("deployment drift at step " + std::to_string(step));
            }
        }

        bool checkpoint = options.oracle_every > 0 && (step % options.oracle_every == 0);

        // --- advance one logical time step ---
        if (options.simulate) {
            std::map<std::string, std::vector<Event>> by_type;
            auto schedule = [&](const std::string& type) {
                if (!by_type.count(type))
                    by_type.emplace(type,
                                    detail::make_events(type, source_seq[type],
                                                        options.events_per_step));
            };

            StepResult merged_out;
            if (mode == ReplayMode::Reuse) {
                std::map<std::string, std::vector<Event>> inj;
                for (const auto& [rname, R] : st.running)
                    for (const auto& t : R.tasks)
                        if (t.is_source()) {
                            schedule(t.abstract.type);
                            inj[t.id] = by_type.at(t.abstract.type);
                        }
                merged_out = dep.step(inj);
            }
            std::map<std::string, StepResult> world_out;
            for (auto& [name, world] : worlds) {
                std::map<std::string, std::vector<Event>> inj;
                for (const auto& f : world.fragments)
                    for (const auto& t : f.tasks)
                        if (t.is_source()) {
                            schedule(t.abstract.type);
                            inj[t.id] = by_type.at(t.abstract.type);
                        }
                world_out.emplace(name, world.step(inj));
            }

            if (mode == ReplayMode::Reuse && options.check_outputs && checkpoint) {
                static const std::vector<Event> kNoEvents;
                for (const auto& [name, doc] : st.submitted) {
                    const StepResult& ref = world_out.at(name);
                    for (const auto& sink : doc.sink_ids()) {
                        const std::string& bound = st.sink_bindings.at({name, sink});
                        auto mi = merged_out.sink_events.find(bound);
                        auto ri = ref.sink_events.find(sink);
                        const auto& got = mi == merged_out.sink_events.end() ? kNoEvents : mi->second;
                        const auto& want = ri == ref.sink_events.end() ? kNoEvents : ri->second;
                        if (got != want)
                            throw Error("output mismatch at step " + std::to_string(step) +
                                        " for '" + name + "' sink '" + sink + "'");
                    }
                }
            }
        }

        // --- sample metrics ---
        StepSample sample;
        sample.step = step;
        if (mode == ReplayMode::Reuse) {
            sample.running_tasks = st.running_task_count();
            sample.cost = dep.cost();
            sample.fragments = dep.fragment_count();
            sample.paused = dep.paused_count();
            std::map<std::string, std::size_t> per_task;
            for (const auto& [rname, R] : st.running) {
                AdjacencyIndex adj(R);
                for (const auto& name : st.decomposition.at(rname)) {
                    std::set<std::string> roots;
                    for (const auto& sink : st.submitted.at(name).sink_ids())
                        roots.insert(st.sink_bindings.at({name, sink}));
                    for (const auto& id : detail::ancestor_closure(adj, roots)) ++per_task[id];
                }
            }
            for (const auto& [id, k] : per_task) ++sample.usage_counts[k];
        } else {
            for (const auto& [name, world] : worlds) {
                sample.running_tasks += world.deployed_task_count();
                sample.cost += world.cost();
                sample.fragments += world.fragment_count();
            }
            if (sample.running_tasks > 0) sample.usage_counts[1] = sample.running_tasks;
        }
        result.samples.push_back(std::move(sample));
    }
    return result;
}

/// Time-weighted fraction of task-steps spent at each usage level k >= 2.
/// Task-step weighting: every (task, step) pair counts once; usage-1 task
/// time forms the residual and is omitted from the report.
inline std::map<std::size_t, double> reuse_histogram(const ReplayResult& result) {
    std::map<std::size_t, std::uint64_t> task_steps;
    std::uint64_t total = 0;
    for (const auto& s : result.samples)
        for (const auto& [k, n] : s.usage_counts) {
            task_steps[k] += n;
            total += n;
        }
    std::map<std::size_t, double> out;
    if (total == 0) return out;
    for (const auto& [k, n] : task_steps)
        if (k >= 2) out[k] = static_cast<double>(n) / static_cast<double>(total);
    return out;
}

inline std::vector<MetricsSample> combine_series(const ReplayResult& def,
                                                 const ReplayResult& reuse) {
    std::vector<MetricsSample> out;
    std::size_t n = std::min(def.samples.size(), reuse.samples.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        MetricsSample m;
        m.step = def.samples[i].step;
        m.running_tasks_default = def.samples[i].running_tasks;
        m.running_tasks_reuse = reuse.samples[i].running_tasks;
        m.cost_default = def.samples[i].cost;
        m.cost_reuse = reuse.samples[i].cost;
        out.push_back(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline nlohmann::json workload_spec_to_json(const WorkloadSpec& s) {
    return nlohmann::json{{"dag_count", s.dag_count},     {"tasks_min", s.tasks_min},
                          {"tasks_max", s.tasks_max},     {"source_pool", s.source_pool},
                          {"prefix_share", s.prefix_share}, {"fan_out_prob", s.fan_out_prob},
                          {"seed", s.seed}};
}

inline WorkloadSpec workload_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("workload spec must be a JSON object");
    WorkloadSpec s;
    s.dag_count = j.value("dag_count", s.dag_count);
    s.tasks_min = j.value("tasks_min", s.tasks_min);
    s.tasks_max = j.value("tasks_max", s.tasks_max);
    s.source_pool = j.value("source_pool", s.source_pool);
    s.prefix_share = j.value("prefix_share", s.prefix_share);
    s.fan_out_prob = j.value("fan_out_prob", s.fan_out_prob);
    s.seed = j.value("seed", s.seed);
    validate_spec(s);
    return s;
}

inline nlohmann::json workload_to_json(const std::vector<Dataflow>& workload,
                                       const WorkloadSpec* spec = nullptr) {
    nlohmann::json dags = nlohmann::json::array();
    for (const auto& d : workload) dags.push_back(dataflow_to_json(d));
    nlohmann::json out{{"dataflows", dags}};
    if (spec) out["spec"] = workload_spec_to_json(*spec);
    return out;
}

inline std::vector<Dataflow> workload_from_json(const nlohmann::json& j) {
    auto it = j.find("dataflows");
    if (it == j.end() || !it->is_array()) throw ParseError("workload: missing 'dataflows' array");
    std::vector<Dataflow> out;
    for (const auto& doc : *it) {
        Dataflow d = dataflow_from_json(doc);
        throw_on_invalid(d);
        out.push_back(std::move(d));
    }
    return out;
}

inline nlohmann::json trace_to_json(const Trace& t) {
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : t.actions)
        actions.push_back({{"step", a.step},
                           {"op", a.op == TraceAction::Op::Submit ? "submit" : "remove"},
                           {"name", a.name}});
    return nlohmann::json{{"kind", t.kind == Trace::Kind::Seq ? "seq" : "rw"},
                          {"actions", actions}};
}

inline Trace trace_from_json(const nlohmann::json& j) {
    Trace t;
    std::string kind = j.value("kind", "seq");
    if (kind == "seq")
        t.kind = Trace::Kind::Seq;
    else if (kind == "rw")
        t.kind = Trace::Kind::Rw;
    else
        throw ParseError("trace: unknown kind '" + kind + "'");
    auto it = j.find("actions");
    if (it == j.end() || !it->is_array()) throw ParseError("trace: missing 'actions' array");
    std::set<std::string> live;
    for (const auto& ja : *it) {
        TraceAction a;
        a.step = ja.value("step", static_cast<std::uint64_t>(t.actions.size()));
        std::string op = ja.value("op", "");
        if (op == "submit")
            a.op = TraceAction::Op::Submit;
        else if (op == "remove")
            a.op = TraceAction::Op::Remove;
        else
            throw ParseError("trace: unknown op '" + op + "'");
        a.name = ja.value("name", "");
        if (a.name.empty()) throw ParseError("trace: action without name");
        if (!t.actions.empty() && a.step < t.actions.back().step)
            throw ParseError("trace: steps must be non-decreasing");
        if (a.op == TraceAction::Op::Submit && !live.insert(a.name).second)
            throw ParseError("trace: '" + a.name + "' submitted while live");
        if (a.op == TraceAction::Op::Remove && live.erase(a.name) == 0)
            throw ParseError("trace: '" + a.name + "' removed while not live");
        t.actions.push_back(std::move(a));
    }
    return t;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<const ReplayResult*>& results) {
    os << "step,mode,running_tasks,cost,fragments,paused\n";
    for (const ReplayResult* r : results) {
        const char* mode = r->mode == ReplayMode::Default ? "default" : "reuse";
        for (const auto& s : r->samples) {
            char cost[48];
            std::snprintf(cost, sizeof(cost), "%.3f", s.cost);
            os << s.step << ',' << mode << ',' << s.running_tasks << ',' << cost << ','
               << s.fragments << ',' << s.paused << '\n';
        }
    }
}

inline void write_histogram_csv(std::ostream& os, const std::map<std::size_t, double>& histogram) {
    os << "bucket_low,bucket_high,time_fraction\n";
    for (const auto& [k, frac] : histogram) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.6f", frac);
        os << k << ',' << (k + 1) << ',' << buf << '\n';
    }
}

} // namespace reflow

#endif // REFLOW_HARNESS_HPP
