#ifndef REFLOW_VALIDATION_HPP
#define REFLOW_VALIDATION_HPP

#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "reflow/dataflow.hpp"
#include "reflow/equivalence.hpp"

namespace reflow {

enum class ViolationKind {
    DuplicateId,       // two tasks share an id
    UnknownEndpoint,   // stream endpoint does not resolve to a task
    SelfLoop,          // stream with from == to
    DuplicateStream,   // more than one stream between the same task pair
    Cycle,             // stream relation is not acyclic
    Boundary,          // missing source/sink, source with in-edges, sink with out-edges
    Disconnected,      // task not on any source-to-sink path
    NotDedup,          // two equivalent tasks in the same dataflow
};

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::DuplicateId: return "duplicate-id";
        case ViolationKind::UnknownEndpoint: return "unknown-endpoint";
        case ViolationKind::SelfLoop: return "self-loop";
        case ViolationKind::DuplicateStream: return "duplicate-stream";
        case ViolationKind::Cycle: return "cycle";
        case ViolationKind::Boundary: return "boundary";
        case ViolationKind::Disconnected: return "disconnected";
        case ViolationKind::NotDedup: return "not-dedup";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind k) const {
        for (const auto& v : violations)
            if (v.kind == k) return true;
        return false;
    }
};

/// Checks every structural invariant of a dataflow and reports all violations.
/// Semantic checks (boundary, connectivity, de-dup) only run once the graph is
/// referentially sound and acyclic, since they are undefined otherwise.
inline ValidationReport validate(const Dataflow& d) {
    ValidationReport report;
    auto add = [&](ViolationKind k, std::string msg) {
        report.violations.push_back(Violation{k, std::move(msg)});
    };

    std::unordered_set<std::string> ids;
    for (const auto& t : d.tasks)
        if (!ids.insert(t.id).second) add(ViolationKind::DuplicateId, "task id '" + t.id + "'");

    bool refs_ok = true;
    std::set<std::pair<std::string, std::string>> seen_streams;
    for (const auto& s : d.streams) {
        if (!ids.count(s.from)) {
            add(ViolationKind::UnknownEndpoint, "stream from '" + s.from + "'");
            refs_ok = false;
        }
        if (!ids.count(s.to)) {
            add(ViolationKind::UnknownEndpoint, "stream to '" + s.to + "'");
            refs_ok = false;
        }
        if (s.from == s.to) {
            add(ViolationKind::SelfLoop, "stream '" + s.from + "' -> '" + s.to + "'");
            refs_ok = false;
        }
        if (!seen_streams.insert({s.from, s.to}).second)
            add(ViolationKind::DuplicateStream, "stream '" + s.from + "' -> '" + s.to + "'");
    }

    bool acyclic = topological_order(d).has_value();
    if (!acyclic) add(ViolationKind::Cycle, "stream relation contains a cycle");

    AdjacencyIndex adj(d);
    std::size_t sources = 0, sinks = 0;
    for (const auto& t : d.tasks) {
        if (t.is_source()) {
            ++sources;
            if (adj.in_degree(t.id) > 0)
                add(ViolationKind::Boundary, "source '" + t.id + "' has incoming streams");
        }
        if (t.is_sink()) {
            ++sinks;
            if (adj.out_degree(t.id) > 0)
                add(ViolationKind::Boundary, "sink '" + t.id + "' has outgoing streams");
        }
    }
    if (sources == 0) add(ViolationKind::Boundary, "no source task");
    if (sinks == 0) add(ViolationKind::Boundary, "no sink task");

    if (refs_ok && acyclic) {
        // Every task must lie on some source-to-sink path.
        std::set<std::string> fwd, bwd;
        std::vector<std::string> stack;
        for (const auto& t : d.tasks)
            if (t.is_source()) {
                fwd.insert(t.id);
                stack.push_back(t.id);
            }
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (const auto& c : adj.children(cur))
                if (fwd.insert(c).second) stack.push_back(c);
        }
        for (const auto& t : d.tasks)
            if (t.is_sink()) {
                bwd.insert(t.id);
                stack.push_back(t.id);
            }
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (const auto& p : adj.parents(cur))
                if (bwd.insert(p).second) stack.push_back(p);
        }
        for (const auto& t : d.tasks)
            if (!fwd.count(t.id) || !bwd.count(t.id))
                add(ViolationKind::Disconnected,
                    "task '" + t.id + "' is not on a source-to-sink path");

        SignatureIndex sigs(d);
        EquivalenceMatcher matcher(sigs, sigs);
        for (const auto& [dg, same] : sigs.by_digest()) {
            if (same.size() < 2) continue;
            for (std::size_t i = 0; i < same.size(); ++i)
                for (std::size_t j = i + 1; j < same.size(); ++j)
                    if (matcher.equivalent(same[i], same[j]))
                        add(ViolationKind::NotDedup,
                            "tasks '" + same[i] + "' and '" + same[j] + "' are equivalent");
        }
    }

    return report;
}

inline bool is_valid(const Dataflow& d) { return validate(d).ok(); }

/// Throws the typed error corresponding to the most fundamental violation.
inline void throw_on_invalid(const Dataflow& d) {
    ValidationReport r = validate(d);
    if (r.ok()) return;
    auto first_msg = [&](ViolationKind k) -> const std::string& {
        for (const auto& v : r.violations)
            if (v.kind == k) return v.message;
        static const std::string empty;
        return empty;
    };
    if (r.has(ViolationKind::DuplicateId)) throw DuplicateIdError(first_msg(ViolationKind::DuplicateId));
    if (r.has(ViolationKind::UnknownEndpoint)) throw ParseError(first_msg(ViolationKind::UnknownEndpoint));
    if (r.has(ViolationKind::SelfLoop)) throw ParseError(first_msg(ViolationKind::SelfLoop));
    if (r.has(ViolationKind::DuplicateStream)) throw ParseError(first_msg(ViolationKind::DuplicateStream));
    if (r.has(ViolationKind::Cycle)) throw CycleError(first_msg(ViolationKind::Cycle));
    if (r.has(ViolationKind::Boundary)) throw BoundaryError(first_msg(ViolationKind::Boundary));
    if (r.has(ViolationKind::Disconnected)) throw BoundaryError(first_msg(ViolationKind::Disconnected));
    throw NotDedupError(first_msg(ViolationKind::NotDedup));
}

} // namespace reflow

#endif // REFLOW_VALIDATION_HPP
