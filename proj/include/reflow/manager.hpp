#ifndef REFLOW_MANAGER_HPP
#define REFLOW_MANAGER_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "reflow/dataflow.hpp"
#include "reflow/equivalence.hpp"
#include "reflow/validation.hpp"

namespace reflow {

// ---------------------------------------------------------------------------
// Plans and reports
// ---------------------------------------------------------------------------

/// What a submit decided: which running DAGs merge, which of their tasks are
/// reused, and which tasks/streams must be newly instantiated.
struct MergePlan {
    std::string submitted_name;
    std::string result_name;                       // running DAG after the merge
    std::set<std::string> absorbed;                // running DAGs united by this merge
    std::set<std::string> reused_tasks;            // running ids serving the new DAG
    std::vector<ConcreteTask> new_tasks;           // freshly minted tasks
    std::vector<Stream> internal_streams;          // both endpoints new
    std::vector<Stream> boundary_streams;          // reused upstream -> new downstream
    std::map<std::string, std::string> task_bindings; // submitted id -> running id
};

/// What a remove decided: which running tasks/streams terminate and how the
/// affected running DAG splits.
struct UnmergePlan {
    std::string removed_name;
    std::string affected;                          // running DAG that contained it
    std::set<std::string> terminated_tasks;
    std::vector<Stream> disconnected_streams;
    std::vector<Dataflow> components;              // replacement running DAGs
};

enum class ConstraintKind {
    UncoveredSink,        // submitted sink with no equivalent running task
    OrphanTask,           // running task outside every submitted sink closure
    OrphanStream,         // running stream outside every submitted sink closure
    RunningOverlap,       // two running DAGs are not disjoint
    RunningInvalid,       // a running DAG fails dataflow validation (incl. de-dup)
    MappingInconsistent,  // decomposition/inverse/binding tables disagree
};

inline const char* to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::UncoveredSink: return "uncovered-sink";
        case ConstraintKind::OrphanTask: return "orphan-task";
        case ConstraintKind::OrphanStream: return "orphan-stream";
        case ConstraintKind::RunningOverlap: return "running-overlap";
        case ConstraintKind::RunningInvalid: return "running-invalid";
        case ConstraintKind::MappingInconsistent: return "mapping-inconsistent";
    }
    return "unknown";
}

struct ConstraintIssue {
    ConstraintKind kind;
    std::string message;
};

struct ConstraintReport {
    std::vector<ConstraintIssue> issues;
    bool ok() const { return issues.empty(); }
};

// ---------------------------------------------------------------------------
// Manager state
// ---------------------------------------------------------------------------

/// Submitted/running bookkeeping. A plain value: submit and remove take the
/// current state and return the next one, so a failed action leaves the
/// caller's state untouched.
struct ManagerState {
    std::map<std::string, Dataflow> submitted;            // by submitted name, ids namespaced
    std::map<std::string, Dataflow> running;              // by running DAG name
    std::map<std::string, std::set<std::string>> decomposition;  // running -> submitted names
    std::map<std::string, std::string> inverse;                  // submitted -> running name
    std::map<std::pair<std::string, std::string>, std::string> sink_bindings;
    std::uint64_t next_task_seq = 0;
    std::uint64_t next_dag_seq = 0;

    std::size_t running_task_count() const {
        std::size_t n = 0;
        for (const auto& [name, d] : running) n += d.tasks.size();
        return n;
    }

    std::set<std::string> all_task_ids() const {
        std::set<std::string> out;
        for (const auto& [name, d] : submitted)
            for (const auto& t : d.tasks) out.insert(t.id);
        for (const auto& [name, d] : running)
            for (const auto& t : d.tasks) out.insert(t.id);
        return out;
    }

    std::string mint_task_id(const std::set<std::string>& used, const std::string& type_hint) {
        while (true) {
            std::string id = "t" + std::to_string(next_task_seq++) + "." + type_hint;
            if (!used.count(id)) return id;
        }
    }

    std::string mint_dag_name() {
        std::string name = "R" + std::to_string(next_dag_seq++);
        while (running.count(name)) name = "R" + std::to_string(next_dag_seq++);
        return name;
    }
};

/// Ids in submitted documents are namespaced by dataflow name on ingest, since
/// users cannot coordinate ids across submissions.
inline std::string namespaced_id(const std::string& dag_name, const std::string& id) {
    return dag_name + "/" + id;
}

inline Dataflow namespaced_copy(const Dataflow& d) {
    Dataflow out;
    out.name = d.name;
    out.tasks.reserve(d.tasks.size());
    for (const auto& t : d.tasks)
        out.tasks.push_back(ConcreteTask{namespaced_id(d.name, t.id), t.abstract});
    out.streams.reserve(d.streams.size());
    for (const auto& s : d.streams)
        out.streams.push_back(Stream{namespaced_id(d.name, s.from), namespaced_id(d.name, s.to)});
    return out;
}

namespace detail {

/// Upward closure from `roots`: the roots plus all their ancestors.
inline std::set<std::string> ancestor_closure(const AdjacencyIndex& adj,
                                              const std::set<std::string>& roots) {
    std::set<std::string> members = roots;
    std::vector<std::string> stack(roots.begin(), roots.end());
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const auto& p : adj.parents(cur))
            if (members.insert(p).second) stack.push_back(p);
    }
    return members;
}

class UnionFind {
public:
    void add(const std::string& x) { parent_.emplace(x, x); }
    const std::string& find(const std::string& x) {
        std::string& p = parent_.at(x);
        if (p != x) p = find(p);
        return parent_.at(x);
    }
    void unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
    }

private:
    std::map<std::string, std::string> parent_;
};

struct SplitPart {
    Dataflow dataflow;                 // name left empty; caller assigns
    std::set<std::string> serves;      // submitted names bound into this part
};

/// Splits (tasks, streams) into weakly-connected components, then regroups so
/// that all binding tasks of one submitted DAG stay in a single part. The
/// grouping keeps the inverse mapping single-valued for submitted DAGs that
/// are themselves disconnected.
inline std::vector<SplitPart> split_components(
    const std::vector<ConcreteTask>& tasks, const std::vector<Stream>& streams,
    const std::map<std::string, std::set<std::string>>& bindings_by_submitted) {
    UnionFind uf;
    for (const auto& t : tasks) uf.add(t.id);
    for (const auto& s : streams) uf.unite(s.from, s.to);
    for (const auto& [name, ids] : bindings_by_submitted) {
        auto it = ids.begin();
        if (it == ids.end()) continue;
        for (auto jt = std::next(it); jt != ids.end(); ++jt) uf.unite(*it, *jt);
    }

    std::map<std::string, SplitPart> parts;   // keyed by component root
    for (const auto& t : tasks) parts[uf.find(t.id)].dataflow.tasks.push_back(t);
    for (const auto& s : streams) parts[uf.find(s.from)].dataflow.streams.push_back(s);
    for (const auto& [name, ids] : bindings_by_submitted)
        if (!ids.empty()) parts[uf.find(*ids.begin())].serves.insert(name);

    std::vector<SplitPart> out;
    out.reserve(parts.size());
    for (auto& [root, part] : parts) out.push_back(std::move(part));
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Constraint verification
// ---------------------------------------------------------------------------

/// Checks the two system constraints plus the bookkeeping invariants:
/// every submitted sink covered by an equivalent running task; every running
/// task/stream inside some submitted sink's ancestor image; running DAGs
/// pairwise disjoint, individually valid de-dup DAGs; tables consistent.
inline ConstraintReport check_constraints(const ManagerState& state) {
    ConstraintReport report;
    auto add = [&](ConstraintKind k, std::string msg) {
        report.issues.push_back(ConstraintIssue{k, std::move(msg)});
    };

    // Table consistency: decomposition partitions the submitted names and
    // inverse points back into it.
    std::set<std::string> seen;
    for (const auto& [rname, names] : state.decomposition) {
        if (!state.running.count(rname))
            add(ConstraintKind::MappingInconsistent, "decomposition names unknown running '" + rname + "'");
        for (const auto& n : names) {
            if (!seen.insert(n).second)
                add(ConstraintKind::MappingInconsistent, "submitted '" + n + "' in two running DAGs");
            auto it = state.inverse.find(n);
            if (it == state.inverse.end() || it->second != rname)
                add(ConstraintKind::MappingInconsistent, "inverse of '" + n + "' disagrees");
        }
    }
    for (const auto& [name, d] : state.submitted)
        if (!seen.count(name))
            add(ConstraintKind::MappingInconsistent, "submitted '" + name + "' not in decomposition");
    for (const auto& [name, rname] : state.inverse)
        if (!state.submitted.count(name))
            add(ConstraintKind::MappingInconsistent, "inverse has unknown submitted '" + name + "'");
    if (state.running.size() != state.decomposition.size())
        add(ConstraintKind::MappingInconsistent, "running set and decomposition differ in size");
    if (!report.ok()) return report;   // structural tables broken; later checks would throw

    // Per running DAG caches.
    std::map<std::string, SignatureIndex> running_sigs;
    std::map<std::string, AdjacencyIndex> running_adj;
    for (const auto& [rname, R] : state.running) {
        ValidationReport v = validate(R);
        if (!v.ok()) {
            add(ConstraintKind::RunningInvalid,
                "running '" + rname + "': " + to_string(v.violations.front().kind) + " " +
                    v.violations.front().message);
            continue;
        }
        running_sigs.emplace(rname, SignatureIndex(R));
        running_adj.emplace(rname, AdjacencyIndex(R));
    }
    if (!report.ok()) return report;

    // Sink coverage: every submitted sink resolves, via its recorded
    // binding, to an equivalent running task.
    std::map<std::string, std::set<std::string>> retained_roots;   // running -> binding ids
    for (const auto& [name, sub] : state.submitted) {
        const std::string& rname = state.inverse.at(name);
        const Dataflow& R = state.running.at(rname);
        SignatureIndex sub_sigs(sub);
        EquivalenceMatcher matcher(sub_sigs, running_sigs.at(rname));
        for (const auto& sink : sub.sink_ids()) {
            auto it = state.sink_bindings.find({name, sink});
            if (it == state.sink_bindings.end()) {
                add(ConstraintKind::UncoveredSink, "no binding for sink '" + sink + "' of '" + name + "'");
                continue;
            }
            if (!R.has_task(it->second)) {
                add(ConstraintKind::UncoveredSink,
                    "binding of sink '" + sink + "' names missing task '" + it->second + "'");
                continue;
            }
            if (!matcher.equivalent(sink, it->second))
                add(ConstraintKind::UncoveredSink,
                    "sink '" + sink + "' of '" + name + "' not equivalent to bound task '" +
                        it->second + "'");
            retained_roots[rname].insert(it->second);
        }
    }

    // Minimization: every running task and stream lies inside some
    // submitted sink's ancestor image.
    for (const auto& [rname, R] : state.running) {
        std::set<std::string> retained = detail::ancestor_closure(
            running_adj.at(rname), retained_roots.count(rname) ? retained_roots.at(rname)
                                                               : std::set<std::string>{});
        for (const auto& t : R.tasks)
            if (!retained.count(t.id))
                add(ConstraintKind::OrphanTask, "running task '" + t.id + "' serves no submitted sink");
        for (const auto& s : R.streams)
            if (!retained.count(s.to))
                add(ConstraintKind::OrphanStream,
                    "running stream '" + s.from + "' -> '" + s.to + "' serves no submitted sink");
    }

    // Running DAGs must be pairwise disjoint.
    for (auto it = state.running.begin(); it != state.running.end(); ++it)
        for (auto jt = std::next(it); jt != state.running.end(); ++jt)
            if (!dags_disjoint(it->second, jt->second))
                add(ConstraintKind::RunningOverlap,
                    "running '" + it->first + "' and '" + jt->first + "' overlap");

    return report;
}

// ---------------------------------------------------------------------------
// Merging (submit)
// ---------------------------------------------------------------------------

inline std::pair<ManagerState, MergePlan> submit(const ManagerState& state, const Dataflow& d) {
    if (d.name.empty()) throw InvalidDataflowError("dataflow name must be non-empty");
    if (state.submitted.count(d.name)) throw DuplicateNameError(d.name);
    {
        ValidationReport r = validate(d);
        if (!r.ok())
            throw InvalidDataflowError(d.name + ": " + to_string(r.violations.front().kind) +
                                       ": " + r.violations.front().message);
    }

    ManagerState next = state;
    Dataflow sub = namespaced_copy(d);
    for (const auto& t : sub.tasks)
        for (const auto& [other, od] : state.submitted)
            if (od.has_task(t.id))
                throw InvalidDataflowError("namespaced id '" + t.id + "' collides with '" + other + "'");

    // Overlap pruning: only running DAGs sharing an equivalent source task can
    // overlap with the submission.
    std::set<std::string> source_types;
    for (const auto& t : sub.tasks)
        if (t.is_source()) source_types.insert(t.abstract.type);
    std::set<std::string> absorbed;
    for (const auto& [rname, R] : state.running)
        for (const auto& t : R.tasks)
            if (t.is_source() && source_types.count(t.abstract.type)) {
                absorbed.insert(rname);
                break;
            }

    // Union of the overlapping running DAGs.
    Dataflow merged;
    merged.name = "(merged)";
    for (const auto& rname : absorbed) {
        const Dataflow& R = state.running.at(rname);
        merged.tasks.insert(merged.tasks.end(), R.tasks.begin(), R.tasks.end());
        merged.streams.insert(merged.streams.end(), R.streams.begin(), R.streams.end());
    }

    // eta: submitted task -> its equivalent in the merged DAG. The reused set
    // (the union of the maximal ancestor intersection) is exactly the image.
    std::map<std::string, std::string> eta;
    if (!merged.tasks.empty()) {
        SignatureIndex sub_sigs(sub);
        SignatureIndex merged_sigs(merged);
        EquivalenceMatcher matcher(sub_sigs, merged_sigs);
        auto by_digest = merged_sigs.by_digest();
        for (const auto& t : sub.tasks) {
            auto it = by_digest.find(sub_sigs.at(t.id).digest);
            if (it == by_digest.end()) continue;
            for (const auto& cand : it->second)
                if (matcher.equivalent(t.id, cand)) {
                    eta.emplace(t.id, cand);
                    break;
                }
        }
    }

    // Mint the non-overlapping tasks, in sorted id order for determinism.
    std::set<std::string> used = state.all_task_ids();
    std::vector<ConcreteTask> sorted_tasks = sub.tasks;
    std::sort(sorted_tasks.begin(), sorted_tasks.end(),
              [](const ConcreteTask& a, const ConcreteTask& b) { return a.id < b.id; });
    std::map<std::string, std::string> minted;
    std::vector<ConcreteTask> new_tasks;
    for (const auto& t : sorted_tasks) {
        if (eta.count(t.id)) continue;
        std::string id = next.mint_task_id(used, t.abstract.type);
        used.insert(id);
        minted.emplace(t.id, id);
        new_tasks.push_back(ConcreteTask{id, t.abstract});
    }

    // Streams of the submission, rebound into the running id space.
    std::set<std::pair<std::string, std::string>> merged_streams;
    for (const auto& s : merged.streams) merged_streams.insert({s.from, s.to});
    std::vector<Stream> sorted_streams = sub.streams;
    std::sort(sorted_streams.begin(), sorted_streams.end());
    std::vector<Stream> internal_streams, boundary_streams;
    for (const auto& s : sorted_streams) {
        bool up_reused = eta.count(s.from) > 0;
        bool down_reused = eta.count(s.to) > 0;
        if (up_reused && down_reused) {
            if (!merged_streams.count({eta.at(s.from), eta.at(s.to)}))
                throw ConstraintViolationError("reused stream '" + s.from + "' -> '" + s.to +
                                               "' missing from merged DAG");
        } else if (!up_reused && !down_reused) {
            internal_streams.push_back(Stream{minted.at(s.from), minted.at(s.to)});
        } else if (up_reused) {
            boundary_streams.push_back(Stream{eta.at(s.from), minted.at(s.to)});
        } else {
            // Ancestor-closedness of the reused set makes this unreachable.
            throw ConstraintViolationError("new task '" + s.from + "' feeds reused task '" + s.to + "'");
        }
    }

    // Result running DAG replaces the absorbed ones.
    std::string result_name;
    if (absorbed.size() == 1)
        result_name = *absorbed.begin();
    else
        result_name = next.mint_dag_name();
    Dataflow result;
    result.name = result_name;
    result.tasks = merged.tasks;
    result.tasks.insert(result.tasks.end(), new_tasks.begin(), new_tasks.end());
    result.streams = merged.streams;
    result.streams.insert(result.streams.end(), internal_streams.begin(), internal_streams.end());
    result.streams.insert(result.streams.end(), boundary_streams.begin(), boundary_streams.end());

    std::set<std::string> serves{d.name};
    for (const auto& rname : absorbed) {
        auto node = next.decomposition.extract(rname);
        serves.insert(node.mapped().begin(), node.mapped().end());
        next.running.erase(rname);
    }
    next.running.emplace(result_name, std::move(result));
    next.decomposition[result_name] = serves;
    for (const auto& n : serves) next.inverse[n] = result_name;

    MergePlan plan;
    plan.submitted_name = d.name;
    plan.result_name = result_name;
    plan.absorbed = absorbed;
    for (const auto& [sid, rid] : eta) {
        plan.reused_tasks.insert(rid);
        plan.task_bindings.emplace(sid, rid);
    }
    for (const auto& [sid, rid] : minted) plan.task_bindings.emplace(sid, rid);
    plan.new_tasks = new_tasks;
    plan.internal_streams = internal_streams;
    plan.boundary_streams = boundary_streams;

    for (const auto& sink : sub.sink_ids())
        next.sink_bindings[{d.name, sink}] = plan.task_bindings.at(sink);
    next.submitted.emplace(d.name, std::move(sub));

    ConstraintReport verify = check_constraints(next);
    if (!verify.ok())
        throw ConstraintViolationError("after submit of '" + d.name + "': " +
                                       to_string(verify.issues.front().kind) + ": " +
                                       verify.issues.front().message);
    return {std::move(next), std::move(plan)};
}

// ---------------------------------------------------------------------------
// Unmerging (remove)
// ---------------------------------------------------------------------------

inline std::pair<ManagerState, UnmergePlan> remove(const ManagerState& state,
                                                   const std::string& name) {
    if (!state.submitted.count(name)) throw UnknownNameError(name);

    ManagerState next = state;
    const std::string rname = state.inverse.at(name);
    const Dataflow& running_dag = state.running.at(rname);
    std::set<std::string> remaining = state.decomposition.at(rname);
    remaining.erase(name);

    // Ancestor images of every remaining sink, via the recorded bindings.
    std::set<std::string> roots;
    std::map<std::string, std::set<std::string>> bindings_by_submitted;
    for (const auto& n : remaining) {
        const Dataflow& sub = state.submitted.at(n);
        for (const auto& sink : sub.sink_ids()) {
            const std::string& bound = state.sink_bindings.at({n, sink});
            roots.insert(bound);
            bindings_by_submitted[n].insert(bound);
        }
    }
    AdjacencyIndex adj(running_dag);
    std::set<std::string> retained = detail::ancestor_closure(adj, roots);

    UnmergePlan plan;
    plan.removed_name = name;
    plan.affected = rname;
    std::vector<ConcreteTask> kept_tasks;
    for (const auto& t : running_dag.tasks) {
        if (retained.count(t.id))
            kept_tasks.push_back(t);
        else
            plan.terminated_tasks.insert(t.id);
    }
    std::vector<Stream> kept_streams;
    for (const auto& s : running_dag.streams) {
        if (plan.terminated_tasks.count(s.from) || plan.terminated_tasks.count(s.to))
            plan.disconnected_streams.push_back(s);
        else
            kept_streams.push_back(s);
    }

    // Replace the affected running DAG with the split of what remains.
    next.running.erase(rname);
    next.decomposition.erase(rname);
    next.submitted.erase(name);
    next.inverse.erase(name);
    for (auto it = next.sink_bindings.begin(); it != next.sink_bindings.end();)
        it = (it->first.first == name) ? next.sink_bindings.erase(it) : std::next(it);

    if (!kept_tasks.empty()) {
        auto parts = detail::split_components(kept_tasks, kept_streams, bindings_by_submitted);
        for (auto& part : parts) {
            std::string part_name = (parts.size() == 1) ? rname : next.mint_dag_name();
            part.dataflow.name = part_name;
            for (const auto& n : part.serves) next.inverse[n] = part_name;
            next.decomposition[part_name] = part.serves;
            next.running.emplace(part_name, std::move(part.dataflow));
            plan.components.push_back(next.running.at(part_name));
        }
    }

    ConstraintReport verify = check_constraints(next);
    if (!verify.ok())
        throw ConstraintViolationError("after remove of '" + name + "': " +
                                       to_string(verify.issues.front().kind) + ": " +
                                       verify.issues.front().message);
    return {std::move(next), std::move(plan)};
}

// ---------------------------------------------------------------------------
// Rebuild oracle
// ---------------------------------------------------------------------------

/// Constructs the minimal running state for a submitted set directly: one
/// running task per equivalence class over all submitted tasks, streams
/// induced, components split as in remove. The canonical result is fully
/// determined by the submitted set, which makes it the order-independence
/// and minimality oracle for the incremental path.
inline ManagerState rebuild_from_scratch(const std::vector<Dataflow>& submitted_list) {
    ManagerState st;
    for (const auto& d : submitted_list) {
        if (d.name.empty()) throw InvalidDataflowError("dataflow name must be non-empty");
        if (st.submitted.count(d.name)) throw DuplicateNameError(d.name);
        ValidationReport r = validate(d);
        if (!r.ok())
            throw InvalidDataflowError(d.name + ": " + to_string(r.violations.front().kind) +
                                       ": " + r.violations.front().message);
        st.submitted.emplace(d.name, namespaced_copy(d));
    }
    if (st.submitted.empty()) return st;

    std::vector<const Dataflow*> dataflows;
    std::vector<std::string> names;
    for (const auto& [name, d] : st.submitted) {
        names.push_back(name);
        dataflows.push_back(&d);
    }
    EquivalenceClasses classes(dataflows);

    std::set<std::string> used;
    std::vector<ConcreteTask> tasks(classes.size());
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        const auto& c = classes.classes()[ci];
        std::string id = st.mint_task_id(used, c.abstract.type);
        used.insert(id);
        tasks[ci] = ConcreteTask{id, c.abstract};
    }

    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t di = 0; di < dataflows.size(); ++di)
        for (const auto& s : dataflows[di]->streams)
            edges.insert({classes.class_of(di, s.from), classes.class_of(di, s.to)});
    std::vector<Stream> streams;
    streams.reserve(edges.size());
    for (const auto& [a, b] : edges) streams.push_back(Stream{tasks[a].id, tasks[b].id});

    std::map<std::string, std::set<std::string>> bindings_by_submitted;
    for (std::size_t di = 0; di < dataflows.size(); ++di)
        for (const auto& sink : dataflows[di]->sink_ids()) {
            const std::string& bound = tasks[classes.class_of(di, sink)].id;
            st.sink_bindings[{names[di], sink}] = bound;
            bindings_by_submitted[names[di]].insert(bound);
        }

    auto parts = detail::split_components(tasks, streams, bindings_by_submitted);
    for (auto& part : parts) {
        std::string part_name = st.mint_dag_name();
        part.dataflow.name = part_name;
        for (const auto& n : part.serves) st.inverse[n] = part_name;
        st.decomposition[part_name] = part.serves;
        st.running.emplace(part_name, std::move(part.dataflow));
    }

    ConstraintReport verify = check_constraints(st);
    if (!verify.ok())
        throw ConstraintViolationError("rebuild: " + std::string(to_string(verify.issues.front().kind)) +
                                       ": " + verify.issues.front().message);
    return st;
}

// ---------------------------------------------------------------------------
// Canonical comparison
// ---------------------------------------------------------------------------

/// Id-free fingerprint of a state: per running DAG, the sorted task signature
/// multiset, the signature-level edge relation, and the submitted names it
/// serves. Two states with equal fingerprints are isomorphic up to task ids.
inline std::string canonical_fingerprint(const ManagerState& state) {
    std::vector<std::string> dag_keys;
    for (const auto& [rname, R] : state.running) {
        SignatureIndex sigs(R);
        std::vector<std::string> task_part;
        for (const auto& t : R.tasks) task_part.push_back(sigs.at(t.id).digest.to_hex());
        std::sort(task_part.begin(), task_part.end());
        std::vector<std::string> edge_part;
        for (const auto& s : R.streams)
            edge_part.push_back(sigs.at(s.from).digest.to_hex() + ">" +
                                sigs.at(s.to).digest.to_hex());
        std::sort(edge_part.begin(), edge_part.end());

        std::string key = "tasks:";
        for (const auto& p : task_part) key += p + ",";
        key += ";edges:";
        for (const auto& p : edge_part) key += p + ",";
        key += ";serves:";
        if (auto it = state.decomposition.find(rname); it != state.decomposition.end())
            for (const auto& n : it->second) key += n + ",";
        dag_keys.push_back(std::move(key));
    }
    std::sort(dag_keys.begin(), dag_keys.end());
    std::string out;
    for (const auto& k : dag_keys) {
        out += k;
        out += '\n';
    }
    return out;
}

} // namespace reflow

#endif // REFLOW_MANAGER_HPP
