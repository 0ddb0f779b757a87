#ifndef REFLOW_DATAFLOW_HPP
#define REFLOW_DATAFLOW_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reflow/errors.hpp"

namespace reflow {

/// Config values reserved for boundary tasks.
inline constexpr const char* kSourceConfig = "source";
inline constexpr const char* kSinkConfig = "sink";

/// User logic identified by (type, config). Compared byte-exact; config is an
/// opaque parameter blob, except the reserved values "source" and "sink".
struct AbstractTask {
    std::string type;
    std::string config;

    bool is_source() const { return config == kSourceConfig; }
    bool is_sink() const { return config == kSinkConfig; }

    friend bool operator==(const AbstractTask& a, const AbstractTask& b) {
        return a.type == b.type && a.config == b.config;
    }
    friend auto operator<=>(const AbstractTask& a, const AbstractTask& b) = default;
};

/// A deployed instance of an abstract task. The id is globally unique within
/// the manager's scope.
struct ConcreteTask {
    std::string id;
    AbstractTask abstract;

    bool is_source() const { return abstract.is_source(); }
    bool is_sink() const { return abstract.is_sink(); }

    friend bool operator==(const ConcreteTask& a, const ConcreteTask& b) {
        return a.id == b.id && a.abstract == b.abstract;
    }
};

/// Directed edge carrying events from task `from` to task `to`.
struct Stream {
    std::string from;
    std::string to;

    friend bool operator==(const Stream& a, const Stream& b) {
        return a.from == b.from && a.to == b.to;
    }
    friend auto operator<=>(const Stream& a, const Stream& b) = default;
};

/// One unit of data. `origin` names the raw stream the event descends from and
/// `event_id` is its gapless per-origin sequence number; derived events keep
/// the provenance of the input event that triggered them.
struct Event {
    std::string origin;
    std::uint64_t event_id = 0;
    std::string payload;

    friend bool operator==(const Event& a, const Event& b) {
        return a.origin == b.origin && a.event_id == b.event_id && a.payload == b.payload;
    }
};

/// A dataflow DAG. Plain value type; may hold structurally invalid content
/// until checked (see validation.hpp). All algorithms treat it as immutable.
struct Dataflow {
    std::string name;
    std::vector<ConcreteTask> tasks;
    std::vector<Stream> streams;

    const ConcreteTask* find_task(const std::string& id) const {
        for (const auto& t : tasks) {
            if (t.id == id) return &t;
        }
        return nullptr;
    }

    const ConcreteTask& task_at(const std::string& id) const {
        const ConcreteTask* t = find_task(id);
        if (!t) throw UnknownTaskError(id + " in dataflow '" + name + "'");
        return *t;
    }

    bool has_task(const std::string& id) const { return find_task(id) != nullptr; }

    std::vector<std::string> source_ids() const {
        std::vector<std::string> out;
        for (const auto& t : tasks)
            if (t.is_source()) out.push_back(t.id);
        return out;
    }

    std::vector<std::string> sink_ids() const {
        std::vector<std::string> out;
        for (const auto& t : tasks)
            if (t.is_sink()) out.push_back(t.id);
        return out;
    }

    std::size_t task_count() const { return tasks.size(); }
    std::size_t stream_count() const { return streams.size(); }
};

/// Parent/child lookup built once per dataflow. Lookups on ids absent from the
/// dataflow return empty sets rather than failing; callers that need strict
/// checking go through Dataflow::task_at first.
class AdjacencyIndex {
public:
    explicit AdjacencyIndex(const Dataflow& d) {
        for (const auto& t : d.tasks) {
            parents_[t.id];
            children_[t.id];
        }
        for (const auto& s : d.streams) {
            parents_[s.to].push_back(s.from);
            children_[s.from].push_back(s.to);
        }
        for (auto& [id, v] : parents_) std::sort(v.begin(), v.end());
        for (auto& [id, v] : children_) std::sort(v.begin(), v.end());
    }

    const std::vector<std::string>& parents(const std::string& id) const {
        static const std::vector<std::string> empty;
        auto it = parents_.find(id);
        return it == parents_.end() ? empty : it->second;
    }

    const std::vector<std::string>& children(const std::string& id) const {
        static const std::vector<std::string> empty;
        auto it = children_.find(id);
        return it == children_.end() ? empty : it->second;
    }

    std::size_t in_degree(const std::string& id) const { return parents(id).size(); }
    std::size_t out_degree(const std::string& id) const { return children(id).size(); }

private:
    std::unordered_map<std::string, std::vector<std::string>> parents_;
    std::unordered_map<std::string, std::vector<std::string>> children_;
};

/// Kahn's algorithm. Returns task ids in a deterministic topological order
/// (ties broken by id), or nullopt if the stream relation has a cycle.
inline std::optional<std::vector<std::string>> topological_order(const Dataflow& d) {
    std::unordered_map<std::string, std::size_t> indeg;
    for (const auto& t : d.tasks) indeg[t.id] = 0;
    for (const auto& s : d.streams) {
        if (indeg.count(s.to)) ++indeg[s.to];
    }
    AdjacencyIndex adj(d);
    std::set<std::string> ready;
    for (const auto& [id, deg] : indeg)
        if (deg == 0) ready.insert(id);

    std::vector<std::string> order;
    order.reserve(d.tasks.size());
    while (!ready.empty()) {
        std::string id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& c : adj.children(id)) {
            auto it = indeg.find(c);
            if (it != indeg.end() && --it->second == 0) ready.insert(c);
        }
    }
    if (order.size() != d.tasks.size()) return std::nullopt;
    return order;
}

/// Order-insensitive structural equality on (name, task set, stream set).
inline bool structurally_equal(const Dataflow& a, const Dataflow& b) {
    if (a.name != b.name) return false;
    if (a.tasks.size() != b.tasks.size() || a.streams.size() != b.streams.size()) return false;

    auto task_key = [](const ConcreteTask& t) {
        return std::tuple<const std::string&, const std::string&, const std::string&>(
            t.id, t.abstract.type, t.abstract.config);
    };
    std::vector<std::tuple<std::string, std::string, std::string>> ta, tb;
    for (const auto& t : a.tasks) ta.emplace_back(task_key(t));
    for (const auto& t : b.tasks) tb.emplace_back(task_key(t));
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    if (ta != tb) return false;

    std::vector<Stream> sa = a.streams, sb = b.streams;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa == sb;
}

} // namespace reflow

#endif // REFLOW_DATAFLOW_HPP
