#ifndef REFLOW_JSON_IO_HPP
#define REFLOW_JSON_IO_HPP

#include <algorithm>
#include <string>

#include <json.hpp>

#include "reflow/dataflow.hpp"
#include "reflow/validation.hpp"

namespace reflow {

// JSON dataflow document:
//   {"name": str,
//    "tasks": [{"id": str, "type": str, "config": str}],
//    "streams": [{"from": str, "to": str}]}
// Source/sink tasks carry the config values exactly "source"/"sink".

namespace detail {

inline std::string require_string(const nlohmann::json& j, const char* field,
                                  const std::string& where) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        throw ParseError(where + ": missing or non-string field '" + field + "'");
    return it->get<std::string>();
}

} // namespace detail

/// Builds a Dataflow from an already-parsed JSON value, without validation.
inline Dataflow dataflow_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("dataflow document must be a JSON object");
    Dataflow d;
    d.name = detail::require_string(doc, "name", "document");
    if (d.name.empty()) throw ParseError("dataflow name must be non-empty");

    auto tasks = doc.find("tasks");
    if (tasks == doc.end() || !tasks->is_array())
        throw ParseError("document: missing or non-array field 'tasks'");
    for (const auto& jt : *tasks) {
        if (!jt.is_object()) throw ParseError("task entry must be an object");
        ConcreteTask t;
        t.id = detail::require_string(jt, "id", "task");
        t.abstract.type = detail::require_string(jt, "type", "task '" + t.id + "'");
        t.abstract.config = detail::require_string(jt, "config", "task '" + t.id + "'");
        d.tasks.push_back(std::move(t));
    }

    auto streams = doc.find("streams");
    if (streams == doc.end() || !streams->is_array())
        throw ParseError("document: missing or non-array field 'streams'");
    for (const auto& js : *streams) {
        if (!js.is_object()) throw ParseError("stream entry must be an object");
        Stream s;
        s.from = detail::require_string(js, "from", "stream");
        s.to = detail::require_string(js, "to", "stream");
        d.streams.push_back(std::move(s));
    }
    return d;
}

/// Parses and fully validates a dataflow document. Rejects documents that
/// violate any structural invariant, including de-dup.
inline Dataflow parse_dataflow(const std::string& document) {
    nlohmann::json doc = nlohmann::json::parse(document, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed JSON");
    Dataflow d = dataflow_from_json(doc);
    throw_on_invalid(d);
    return d;
}

/// Serializes in canonical order (tasks by id, streams by endpoints), so
/// output is deterministic for structurally equal dataflows.
inline nlohmann::json dataflow_to_json(const Dataflow& d) {
    std::vector<ConcreteTask> tasks = d.tasks;
    std::sort(tasks.begin(), tasks.end(),
              [](const ConcreteTask& a, const ConcreteTask& b) { return a.id < b.id; });
    std::vector<Stream> streams = d.streams;
    std::sort(streams.begin(), streams.end());

    nlohmann::json jt = nlohmann::json::array();
    for (const auto& t : tasks)
        jt.push_back({{"id", t.id}, {"type", t.abstract.type}, {"config", t.abstract.config}});
    nlohmann::json js = nlohmann::json::array();
    for (const auto& s : streams) js.push_back({{"from", s.from}, {"to", s.to}});
    return nlohmann::json{{"name", d.name}, {"tasks", jt}, {"streams", js}};
}

inline std::string serialize_dataflow(const Dataflow& d) { return dataflow_to_json(d).dump(2); }

} // namespace reflow

#endif // REFLOW_JSON_IO_HPP
