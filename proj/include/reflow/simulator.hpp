#ifndef REFLOW_SIMULATOR_HPP
#define REFLOW_SIMULATOR_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "reflow/dataflow.hpp"
#include "reflow/manager.hpp"

namespace reflow {

/// Residual core-equivalents consumed by a paused task that remains deployed.
inline constexpr double kPauseOverhead = 0.027;

// ---------------------------------------------------------------------------
// Task configs and functions
// ---------------------------------------------------------------------------

/// Configs are opaque strings, but the shipped task functions and the cost
/// model read `key=value` pairs separated by ';' out of them.
inline std::optional<std::string> config_param(const std::string& config, const std::string& key) {
    std::size_t pos = 0;
    while (pos <= config.size()) {
        std::size_t end = config.find(';', pos);
        if (end == std::string::npos) end = config.size();
        std::size_t eq = config.find('=', pos);
        if (eq != std::string::npos && eq < end && config.compare(pos, eq - pos, key) == 0)
            return config.substr(eq + 1, end - eq - 1);
        pos = end + 1;
    }
    return std::nullopt;
}

inline double task_weight(const AbstractTask& t) {
    if (auto v = config_param(t.config, "weight")) {
        try {
            return std::stod(*v);
        } catch (...) {
        }
    }
    return 1.0;
}

/// Per-instance state for stateful task functions.
struct TaskRuntimeState {
    std::uint64_t window_fill = 0;
    std::uint64_t window_index = 0;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

} // namespace detail

/// The deterministic user-logic registry. Same (type, config, payload) always
/// yields identical outputs, which is what makes equivalent tasks produce
/// identical streams. Unknown types fall back to tagged echo so that any two
/// distinct abstract tasks produce distinct payload chains; a wrong merge can
/// therefore never go unnoticed by the output-consistency oracle.
inline std::vector<std::string> apply_task_function(const AbstractTask& t,
                                                    const std::string& payload,
                                                    TaskRuntimeState& state) {
    if (t.type == "identity") return {payload};
    if (t.type == "pi") {
        // CPU-proxy logic: iterative Leibniz series.
        long iters = 50;
        if (auto v = config_param(t.config, "iters")) {
            try {
                iters = std::stol(*v);
            } catch (...) {
            }
        }
        double acc = 0.0;
        for (long k = 0; k < iters; ++k)
            acc += (k % 2 == 0 ? 4.0 : -4.0) / static_cast<double>(2 * k + 1);
        return {payload + "|pi=" + detail::format_double(acc)};
    }
    if (t.type == "window-count") {
        std::uint64_t window = 5;
        if (auto v = config_param(t.config, "w")) {
            try {
                window = static_cast<std::uint64_t>(std::stoul(*v));
            } catch (...) {
            }
        }
        if (window == 0) window = 1;
        if (++state.window_fill < window) return {};
        state.window_fill = 0;
        std::string out = "win[" + t.config + "][" + std::to_string(state.window_index++) +
                          "]n=" + std::to_string(window) + "|" + payload;
        return {out};
    }
    return {t.type + "[" + t.config + "](" + payload + ")"};
}

// ---------------------------------------------------------------------------
// Physical deployment model
// ---------------------------------------------------------------------------

/// A physically launched partial DAG. Structure is immutable after launch;
/// later merges add new fragments instead of modifying deployed ones.
struct Fragment {
    std::string name;
    std::vector<ConcreteTask> tasks;
    std::vector<Stream> internal_streams;
    std::map<std::string, std::string> inbound_topics;   // topic -> subscriber task
    std::uint64_t launched_at = 0;
};

struct ControlSignal {
    enum class Kind { Forward, Pause };
    Kind kind;
    std::string topic;   // Forward only
};

/// One broker data topic bridging a boundary stream between fragments.
struct DataTopic {
    std::string name;
    std::string publisher;
    std::vector<std::string> subscribers;
};

struct StepResult {
    std::map<std::string, std::vector<Event>> sink_events;   // by sink task id
};

/// In-process deployment of the running DAGs as broker-connected fragments.
/// Stepping is single-threaded and synchronous: control signals land at the
/// start of a step, events fully propagate within it. A Deployment is a plain
/// value and may be copied for snapshots.
class Deployment {
public:
    std::vector<Fragment> fragments;
    std::map<std::string, DataTopic> data_topics;
    std::map<std::string, std::deque<ControlSignal>> control_topics;   // by task id
    std::map<std::string, std::vector<std::string>> active_forwards;   // task -> topics
    std::set<std::string> paused;
    std::map<std::string, TaskRuntimeState> task_state;
    std::uint64_t clock = 0;
    std::uint64_t next_topic_seq = 0;
    std::uint64_t next_fragment_seq = 0;

    /// Optional JSON-lines event log for debugging/diffing; not copied state.
    std::ostream* event_log = nullptr;

    bool has_task(const std::string& id) const { return find_task(id) != nullptr; }

    const ConcreteTask* find_task(const std::string& id) const {
        for (const auto& f : fragments)
            for (const auto& t : f.tasks)
                if (t.id == id) return &t;
        return nullptr;
    }

    std::size_t deployed_task_count() const {
        std::size_t n = 0;
        for (const auto& f : fragments) n += f.tasks.size();
        return n;
    }

    std::size_t active_task_count() const { return deployed_task_count() - paused.size(); }

    std::size_t fragment_count() const { return fragments.size(); }

    std::size_t paused_count() const { return paused.size(); }

    /// Core-equivalents: active tasks at their configured weight plus the
    /// residual overhead of everything paused-but-deployed.
    double cost() const {
        double total = 0.0;
        for (const auto& f : fragments)
            for (const auto& t : f.tasks)
                if (!paused.count(t.id)) total += task_weight(t.abstract);
        total += kPauseOverhead * static_cast<double>(paused.size());
        return total;
    }

    /// Launches the plan's new tasks as one fragment and wires each boundary
    /// stream through a fresh data topic. Reused tasks are not touched; they
    /// are told to forward via their control topic.
    void apply_merge(const MergePlan& plan) {
        for (const auto& t : plan.new_tasks)
            if (has_task(t.id))
                throw StalePlanError("new task '" + t.id + "' already deployed");
        for (const auto& rid : plan.reused_tasks) {
            if (!has_task(rid)) throw StalePlanError("reused task '" + rid + "' not deployed");
            if (paused.count(rid)) throw StalePlanError("reused task '" + rid + "' is paused");
        }
        if (plan.new_tasks.empty()) return;   // fully shadowed submission

        Fragment f;
        f.name = "f" + std::to_string(next_fragment_seq++) + "." + plan.submitted_name;
        f.tasks = plan.new_tasks;
        f.internal_streams = plan.internal_streams;
        f.launched_at = clock;
        for (const auto& b : plan.boundary_streams) {
            std::string topic = "topic" + std::to_string(next_topic_seq++);
            data_topics.emplace(topic, DataTopic{topic, b.from, {b.to}});
            f.inbound_topics.emplace(topic, b.to);
            control_topics[b.from].push_back(ControlSignal{ControlSignal::Kind::Forward, topic});
        }
        fragments.push_back(std::move(f));
    }

    /// Pauses the plan's terminated tasks through their control topics. No
    /// fragment is torn down; paused tasks stop consuming from the next step
    /// onward but keep accruing the pause overhead.
    void apply_unmerge(const UnmergePlan& plan) {
        for (const auto& id : plan.terminated_tasks) {
            if (!has_task(id)) throw StalePlanError("terminated task '" + id + "' not deployed");
            if (paused.count(id)) throw StalePlanError("task '" + id + "' already paused");
        }
        for (const auto& id : plan.terminated_tasks) {
            control_topics[id].push_back(ControlSignal{ControlSignal::Kind::Pause, ""});
            paused.insert(id);
        }
    }

    /// Runs one synchronous step: delivers pending control signals, injects
    /// the given events at source tasks, and propagates everything in global
    /// topological order (FIFO through topics, duplicate semantics on fan-out,
    /// interleave semantics on fan-in). Returns the events arriving at sink
    /// tasks this step. Fully deterministic.
    StepResult step(const std::map<std::string, std::vector<Event>>& injections) {
        drain_control();

        std::map<std::string, const ConcreteTask*> by_id;
        for (const auto& f : fragments)
            for (const auto& t : f.tasks) by_id.emplace(t.id, &t);

        for (const auto& [src, events] : injections) {
            auto it = by_id.find(src);
            if (it == by_id.end() || !it->second->is_source())
                throw UnknownSourceError("injection target '" + src + "'");
            if (paused.count(src)) throw PausedSourceError(src);
            (void)events;
        }

        // Downstream wiring: fragment-internal streams plus active topics.
        std::map<std::string, std::vector<std::string>> internal_down;
        for (const auto& f : fragments)
            for (const auto& s : f.internal_streams) internal_down[s.from].push_back(s.to);
        for (auto& [from, tos] : internal_down) std::sort(tos.begin(), tos.end());

        std::vector<std::string> order = global_topological_order(by_id, internal_down);

        std::map<std::string, std::vector<Event>> inbox;
        for (const auto& [src, events] : injections) inbox[src] = events;

        StepResult result;
        for (const auto& id : order) {
            auto ib = inbox.find(id);
            if (ib == inbox.end() || ib->second.empty()) continue;
            if (paused.count(id)) continue;   // paused tasks drop their inputs

            const ConcreteTask& t = *by_id.at(id);
            if (t.is_sink()) {
                result.sink_events[id] = ib->second;
                continue;
            }

            std::vector<Event> outputs;
            if (t.is_source()) {
                outputs = ib->second;   // injected events are the source's output
            } else {
                TaskRuntimeState& st = task_state[id];
                for (const Event& in : ib->second)
                    for (auto& payload : apply_task_function(t.abstract, in.payload, st))
                        outputs.push_back(Event{in.origin, in.event_id, std::move(payload)});
            }

            // Duplicate semantics: every output event goes to every internal
            // downstream task and every forwarded topic.
            auto dn = internal_down.find(id);
            if (dn != internal_down.end())
                for (const auto& to : dn->second)
                    for (const Event& e : outputs) {
                        inbox[to].push_back(e);
                        log_delivery("stream", "", id, to, e);
                    }
            auto fw = active_forwards.find(id);
            if (fw != active_forwards.end())
                for (const auto& topic : fw->second)
                    for (const auto& sub : data_topics.at(topic).subscribers)
                        for (const Event& e : outputs) {
                            inbox[sub].push_back(e);
                            log_delivery("topic", topic, id, sub, e);
                        }
        }

        ++clock;
        return result;
    }

private:
    void drain_control() {
        for (auto& [task, queue] : control_topics) {
            while (!queue.empty()) {
                ControlSignal sig = queue.front();
                queue.pop_front();
                if (sig.kind == ControlSignal::Kind::Forward)
                    active_forwards[task].push_back(sig.topic);
                else
                    paused.insert(task);
            }
        }
    }

    // Tasks are processed in topological order with ties broken by their
    // equivalence digest rather than their id. Equivalent tasks carry the
    // same digest in every deployment, so fan-in interleaving is identical
    // between a merged deployment and a standalone run of any dataflow it
    // serves; ids would differ between those worlds and reorder arrivals.
    std::vector<std::string> global_topological_order(
        const std::map<std::string, const ConcreteTask*>& by_id,
        const std::map<std::string, std::vector<std::string>>& internal_down) const {
        Dataflow phys;
        phys.name = "(deployment)";
        for (const auto& f : fragments) {
            phys.tasks.insert(phys.tasks.end(), f.tasks.begin(), f.tasks.end());
            phys.streams.insert(phys.streams.end(), f.internal_streams.begin(),
                                f.internal_streams.end());
        }
        for (const auto& [name, topic] : data_topics)
            for (const auto& sub : topic.subscribers)
                phys.streams.push_back(Stream{topic.publisher, sub});
        if (!topological_order(phys))
            throw Error("deployment wiring contains a cycle");
        SignatureIndex sigs(phys);

        std::map<std::string, std::size_t> indeg;
        for (const auto& [id, t] : by_id) indeg[id] = 0;
        auto edge_targets = [&](const std::string& from, auto&& fn) {
            auto it = internal_down.find(from);
            if (it != internal_down.end())
                for (const auto& to : it->second) fn(to);
            auto f = active_forwards.find(from);
            if (f != active_forwards.end())
                for (const auto& topic : f->second)
                    for (const auto& sub : data_topics.at(topic).subscribers) fn(sub);
        };
        for (const auto& [id, t] : by_id)
            edge_targets(id, [&](const std::string& to) {
                if (indeg.count(to)) ++indeg[to];
            });

        std::set<std::pair<Digest, std::string>> ready;
        for (const auto& [id, d] : indeg)
            if (d == 0) ready.insert({sigs.at(id).digest, id});
        std::vector<std::string> order;
        order.reserve(by_id.size());
        while (!ready.empty()) {
            std::string id = ready.begin()->second;
            ready.erase(ready.begin());
            order.push_back(id);
            edge_targets(id, [&](const std::string& to) {
                auto it = indeg.find(to);
                if (it != indeg.end() && --it->second == 0)
                    ready.insert({sigs.at(to).digest, to});
            });
        }
        if (order.size() != by_id.size())
            throw Error("deployment wiring contains a cycle");
        return order;
    }

    void log_delivery(const char* via, const std::string& topic, const std::string& from,
                      const std::string& to, const Event& e) {
        if (!event_log) return;
        (*event_log) << "{\"step\":" << clock << ",\"" << via << "\":\""
                     << (topic.empty() ? from + ">" + to : topic) << "\",\"from\":\"" << from
                     << "\",\"to\":\"" << to << "\",\"event_id\":" << e.event_id
                     << ",\"origin\":\"" << e.origin << "\"}\n";
    }
};

/// Deploys a whole dataflow as one broker-free fragment (the standalone /
/// non-reuse execution shape).
inline Deployment deploy_dataflow(const Dataflow& d) {
    Deployment dep;
    Fragment f;
    f.name = "f0." + d.name;
    f.tasks = d.tasks;
    f.internal_streams = d.streams;
    f.launched_at = 0;
    dep.fragments.push_back(std::move(f));
    dep.next_fragment_seq = 1;
    return dep;
}

/// Reference execution: runs `d` alone with the same task functions and
/// semantics, one synchronous step over the given injections.
inline std::map<std::string, std::vector<Event>> standalone_run(
    const Dataflow& d, const std::map<std::string, std::vector<Event>>& injections) {
    Deployment dep = deploy_dataflow(d);
    return dep.step(injections).sink_events;
}

} // namespace reflow

#endif // REFLOW_SIMULATOR_HPP
