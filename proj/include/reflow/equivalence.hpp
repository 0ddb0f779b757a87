#ifndef REFLOW_EQUIVALENCE_HPP
#define REFLOW_EQUIVALENCE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "reflow/dataflow.hpp"
#include "reflow/errors.hpp"

namespace reflow {

// ---------------------------------------------------------------------------
// Stable 128-bit structural digest.
//
// Non-cryptographic but deterministic across runs and processes, so digests
// may be persisted. Correctness never rests on the hash: every digest match
// is confirmed by a structural comparison (see EquivalenceMatcher).
// ---------------------------------------------------------------------------

struct Digest {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend bool operator==(const Digest& a, const Digest& b) {
        return a.hi == b.hi && a.lo == b.lo;
    }
    friend auto operator<=>(const Digest& a, const Digest& b) = default;

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(32, '0');
        std::uint64_t v[2] = {hi, lo};
        for (int w = 0; w < 2; ++w)
            for (int i = 0; i < 16; ++i)
                out[w * 16 + i] = digits[(v[w] >> (60 - 4 * i)) & 0xf];
        return out;
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Accumulates tagged fields into a 128-bit digest. Field boundaries are
/// length-framed so concatenation ambiguity cannot produce equal digests.
class DigestBuilder {
public:
    DigestBuilder& absorb(std::uint64_t v) {
        a_ = detail::mix64(a_ ^ v);
        b_ = detail::mix64(b_ + (v ^ 0xc2b2ae3d27d4eb4fULL));
        return *this;
    }

    DigestBuilder& absorb(const std::string& s) {
        absorb(static_cast<std::uint64_t>(s.size()));
        std::uint64_t word = 0;
        int n = 0;
        for (unsigned char c : s) {
            word = (word << 8) | c;
            if (++n == 8) {
                absorb(word);
                word = 0;
                n = 0;
            }
        }
        if (n > 0) absorb(word | (static_cast<std::uint64_t>(n) << 56));
        return *this;
    }

    DigestBuilder& absorb(const Digest& d) {
        absorb(d.hi);
        absorb(d.lo);
        return *this;
    }

    Digest finish() const { return Digest{detail::mix64(a_ ^ b_), detail::mix64(b_ ^ (a_ >> 1))}; }

private:
    std::uint64_t a_ = 0x9e3779b97f4a7c15ULL;
    std::uint64_t b_ = 0xbf58476d1ce4e5b9ULL;
};

/// Canonical fingerprint of a task's equivalence class plus the task's depth
/// (longest source-to-task path). Equal classes always hash equal; a hash
/// match is confirmed structurally before being trusted.
struct EquivalenceSignature {
    Digest digest;
    std::uint32_t depth = 0;

    friend bool operator==(const EquivalenceSignature& a, const EquivalenceSignature& b) {
        return a.digest == b.digest && a.depth == b.depth;
    }
    friend auto operator<=>(const EquivalenceSignature& a,
                            const EquivalenceSignature& b) = default;
};

// ---------------------------------------------------------------------------
// Parent sets and ancestor graphs
// ---------------------------------------------------------------------------

/// Immediate upstream predecessors of `id` within `d`. Empty iff `id` is a
/// source task.
inline std::set<std::string> parents(const Dataflow& d, const std::string& id) {
    d.task_at(id);
    std::set<std::string> out;
    for (const auto& s : d.streams)
        if (s.to == id) out.insert(s.from);
    return out;
}

/// The provenance subgraph of a task: the task, all its ancestors, and every
/// stream connecting them within the owning dataflow.
struct AncestorGraph {
    std::string root;
    std::vector<ConcreteTask> tasks;   // sorted by id
    std::vector<Stream> streams;       // sorted

    bool contains_task(const std::string& id) const {
        return std::binary_search(
            tasks.begin(), tasks.end(), id,
            [](const auto& a, const auto& b) { return task_id(a) < task_id(b); });
    }

    std::set<std::string> task_ids() const {
        std::set<std::string> out;
        for (const auto& t : tasks) out.insert(t.id);
        return out;
    }

private:
    static const std::string& task_id(const ConcreteTask& t) { return t.id; }
    static const std::string& task_id(const std::string& s) { return s; }
};

/// Union recurrence over the parent relation: the task plus its incoming
/// streams plus the ancestor graphs of all parents, with shared ancestors
/// appearing once.
inline AncestorGraph ancestor_graph(const Dataflow& d, const std::string& id) {
    d.task_at(id);
    AdjacencyIndex adj(d);

    std::set<std::string> members;
    std::vector<std::string> frontier{id};
    members.insert(id);
    while (!frontier.empty()) {
        std::string cur = frontier.back();
        frontier.pop_back();
        for (const auto& p : adj.parents(cur))
            if (members.insert(p).second) frontier.push_back(p);
    }

    AncestorGraph g;
    g.root = id;
    for (const auto& t : d.tasks)
        if (members.count(t.id)) g.tasks.push_back(t);
    // Ancestor closure means every stream into a member originates at a member.
    for (const auto& s : d.streams)
        if (members.count(s.to)) g.streams.push_back(s);
    std::sort(g.tasks.begin(), g.tasks.end(),
              [](const ConcreteTask& a, const ConcreteTask& b) { return a.id < b.id; });
    std::sort(g.streams.begin(), g.streams.end());
    return g;
}

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

/// Bottom-up memoized signatures for one dataflow. O(V + E) over the DAG.
class SignatureIndex {
public:
    explicit SignatureIndex(const Dataflow& d) : dataflow_(&d), adj_(d) {
        auto order = topological_order(d);
        if (!order) throw CycleError("signatures undefined on cyclic dataflow '" + d.name + "'");
        for (const auto& id : *order) {
            const ConcreteTask& t = d.task_at(id);
            EquivalenceSignature sig;
            if (t.is_source()) {
                sig.digest = DigestBuilder().absorb(std::uint64_t{0x52}).absorb(t.abstract.type).finish();
                sig.depth = 0;
            } else {
                std::vector<Digest> pd;
                std::uint32_t depth = 0;
                for (const auto& p : adj_.parents(id)) {
                    const auto& ps = sigs_.at(p);
                    pd.push_back(ps.digest);
                    depth = std::max(depth, ps.depth + 1);
                }
                // Parent multiset in canonical order; duplicates are kept so
                // that event multiplicity under duplicate semantics matters.
                std::sort(pd.begin(), pd.end());
                DigestBuilder b;
                b.absorb(std::uint64_t{0x54})
                    .absorb(t.abstract.type)
                    .absorb(t.abstract.config)
                    .absorb(static_cast<std::uint64_t>(pd.size()));
                for (const auto& x : pd) b.absorb(x);
                sig.digest = b.finish();
                sig.depth = depth;
            }
            sigs_.emplace(id, sig);
        }
    }

    const EquivalenceSignature& at(const std::string& id) const {
        auto it = sigs_.find(id);
        if (it == sigs_.end())
            throw UnknownTaskError(id + " in dataflow '" + dataflow_->name + "'");
        return it->second;
    }

    const Dataflow& dataflow() const { return *dataflow_; }
    const AdjacencyIndex& adjacency() const { return adj_; }

    /// digest -> ids carrying it (more than one only under hash collision or
    /// within a non-de-dup dataflow).
    std::map<Digest, std::vector<std::string>> by_digest() const {
        std::map<Digest, std::vector<std::string>> out;
        for (const auto& [id, sig] : sigs_) out[sig.digest].push_back(id);
        for (auto& [dg, ids] : out) std::sort(ids.begin(), ids.end());
        return out;
    }

private:
    const Dataflow* dataflow_;
    AdjacencyIndex adj_;
    std::unordered_map<std::string, EquivalenceSignature> sigs_;
};

inline EquivalenceSignature signature(const Dataflow& d, const std::string& id) {
    return SignatureIndex(d).at(id);
}

// ---------------------------------------------------------------------------
// Task equivalence
// ---------------------------------------------------------------------------

/// Decides task equivalence between two dataflows (or within one): tasks are
/// equivalent iff they are config-similar and their parent multisets match
/// under a perfect matching of equivalent parents. Signatures serve as a
/// sound fast path; every positive answer is confirmed structurally, so hash
/// collisions cannot produce false merges.
class EquivalenceMatcher {
public:
    EquivalenceMatcher(const SignatureIndex& left, const SignatureIndex& right)
        : left_(&left), right_(&right) {}

    bool equivalent(const std::string& lid, const std::string& rid) {
        const auto& ls = left_->at(lid);
        const auto& rs = right_->at(rid);
        if (!(ls == rs)) return false;
        return structural(lid, rid);
    }

private:
    bool structural(const std::string& lid, const std::string& rid) {
        std::string key = lid;
        key.push_back('\x1f');
        key += rid;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        const ConcreteTask& lt = left_->dataflow().task_at(lid);
        const ConcreteTask& rt = right_->dataflow().task_at(rid);
        bool result = false;
        if (lt.abstract == rt.abstract) {
            if (lt.is_source()) {
                result = true;   // source signature is (type, "source") only
            } else {
                result = parents_match(left_->adjacency().parents(lid),
                                       right_->adjacency().parents(rid));
            }
        }
        memo_.emplace(std::move(key), result);
        return result;
    }

    bool parents_match(const std::vector<std::string>& lp, const std::vector<std::string>& rp) {
        if (lp.size() != rp.size()) return false;
        const std::size_t n = lp.size();
        if (n == 0) return true;

        std::vector<std::vector<std::size_t>> cand(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (equivalent(lp[i], rp[j])) cand[i].push_back(j);

        // Kuhn's augmenting paths; parent fan-in is small in practice.
        std::vector<int> match_right(n, -1);
        std::vector<char> visited;
        auto augment = [&](auto&& self, std::size_t i) -> bool {
            for (std::size_t j : cand[i]) {
                if (visited[j]) continue;
                visited[j] = 1;
                if (match_right[j] < 0 ||
                    self(self, static_cast<std::size_t>(match_right[j]))) {
                    match_right[j] = static_cast<int>(i);
                    return true;
                }
            }
            return false;
        };
        for (std::size_t i = 0; i < n; ++i) {
            visited.assign(n, 0);
            if (!augment(augment, i)) return false;
        }
        return true;
    }

    const SignatureIndex* left_;
    const SignatureIndex* right_;
    std::unordered_map<std::string, bool> memo_;
};

inline bool tasks_equivalent(const Dataflow& d1, const std::string& t1, const Dataflow& d2,
                             const std::string& t2) {
    SignatureIndex s1(d1);
    SignatureIndex s2(d2);
    EquivalenceMatcher m(s1, s2);
    return m.equivalent(t1, t2);
}

// ---------------------------------------------------------------------------
// Maximal sets and intersections
// ---------------------------------------------------------------------------

namespace detail {

inline bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool stream_subset(const std::vector<Stream>& a, const std::vector<Stream>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace detail

/// Keeps only graphs not strictly contained (task-set and stream-set) in
/// another member. Equal graphs collapse to one representative.
inline std::vector<AncestorGraph> maximal_ancestor_set(const std::vector<AncestorGraph>& graphs) {
    std::vector<std::set<std::string>> ids;
    ids.reserve(graphs.size());
    for (const auto& g : graphs) ids.push_back(g.task_ids());

    std::vector<bool> keep(graphs.size(), true);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        for (std::size_t j = 0; j < graphs.size() && keep[i]; ++j) {
            if (i == j || !keep[j]) continue;
            if (!detail::subset(ids[i], ids[j]) ||
                !detail::stream_subset(graphs[i].streams, graphs[j].streams))
                continue;
            bool equal = ids[i] == ids[j] && graphs[i].streams == graphs[j].streams;
            // Of equal graphs the lexicographically-first root survives.
            if (!equal || graphs[j].root < graphs[i].root ||
                (graphs[j].root == graphs[i].root && j < i))
                keep[i] = false;
        }
    }
    std::vector<AncestorGraph> out;
    for (std::size_t i = 0; i < graphs.size(); ++i)
        if (keep[i]) out.push_back(graphs[i]);
    std::sort(out.begin(), out.end(),
              [](const AncestorGraph& a, const AncestorGraph& b) { return a.root < b.root; });
    return out;
}

/// Ancestor graphs of every task in `d1` that has an equivalent in `d2`
/// (first-DAG convention). Empty iff the dataflows are disjoint.
inline std::vector<AncestorGraph> ancestor_intersection(const Dataflow& d1, const Dataflow& d2) {
    SignatureIndex s1(d1);
    SignatureIndex s2(d2);
    EquivalenceMatcher m(s1, s2);
    auto rhs_by_digest = s2.by_digest();

    std::vector<AncestorGraph> out;
    std::vector<std::string> roots;
    for (const auto& t : d1.tasks) {
        auto it = rhs_by_digest.find(s1.at(t.id).digest);
        if (it == rhs_by_digest.end()) continue;
        for (const auto& rid : it->second) {
            if (m.equivalent(t.id, rid)) {
                roots.push_back(t.id);
                break;
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back(ancestor_graph(d1, r));
    return out;
}

inline std::vector<AncestorGraph> maximal_ancestor_intersection(const Dataflow& d1,
                                                                const Dataflow& d2) {
    return maximal_ancestor_set(ancestor_intersection(d1, d2));
}

/// Disjointness reduces to having no equivalent source pair: every ancestor
/// graph contains a source, and equivalent tasks have equivalent sources.
inline bool dags_disjoint(const Dataflow& d1, const Dataflow& d2) {
    std::set<std::string> src1;
    for (const auto& t : d1.tasks)
        if (t.is_source()) src1.insert(t.abstract.type);
    for (const auto& t : d2.tasks)
        if (t.is_source() && src1.count(t.abstract.type)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Cross-dataflow equivalence classes
// ---------------------------------------------------------------------------

/// Partition of all tasks across a collection of dataflows into equivalence
/// classes. Digest groups are split by structural confirmation, so a hash
/// collision yields two classes rather than a false merge.
class EquivalenceClasses {
public:
    struct Member {
        std::size_t dataflow_index;
        std::string task_id;
    };
    struct Class {
        Digest digest;
        std::uint32_t depth = 0;
        AbstractTask abstract;
        std::vector<Member> members;
    };

    explicit EquivalenceClasses(const std::vector<const Dataflow*>& dataflows)
        : dataflows_(dataflows) {
        indexes_.reserve(dataflows.size());
        for (const Dataflow* d : dataflows) indexes_.emplace_back(*d);

        std::map<Digest, std::vector<Member>> by_digest;
        for (std::size_t di = 0; di < dataflows.size(); ++di)
            for (const auto& t : dataflows[di]->tasks)
                by_digest[indexes_[di].at(t.id).digest].push_back(Member{di, t.id});

        for (auto& [dg, members] : by_digest) {
            std::vector<std::size_t> reps;   // class indexes opened for this digest
            for (const auto& mem : members) {
                bool placed = false;
                for (std::size_t ci : reps) {
                    const Member& rep = classes_[ci].members.front();
                    if (confirm(rep, mem)) {
                        classes_[ci].members.push_back(mem);
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    Class c;
                    c.digest = dg;
                    c.depth = indexes_[mem.dataflow_index].at(mem.task_id).depth;
                    c.abstract = dataflows_[mem.dataflow_index]->task_at(mem.task_id).abstract;
                    c.members.push_back(mem);
                    reps.push_back(classes_.size());
                    classes_.push_back(std::move(c));
                }
            }
        }
        for (std::size_t ci = 0; ci < classes_.size(); ++ci)
            for (const auto& mem : classes_[ci].members)
                class_of_[key(mem.dataflow_index, mem.task_id)] = ci;
    }

    const std::vector<Class>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }

    std::size_t class_of(std::size_t dataflow_index, const std::string& task_id) const {
        auto it = class_of_.find(key(dataflow_index, task_id));
        if (it == class_of_.end()) throw UnknownTaskError(task_id);
        return it->second;
    }

    const SignatureIndex& index(std::size_t dataflow_index) const {
        return indexes_[dataflow_index];
    }

private:
    static std::string key(std::size_t di, const std::string& id) {
        return std::to_string(di) + '\x1f' + id;
    }

    bool confirm(const Member& a, const Member& b) {
        auto mk = std::make_pair(a.dataflow_index, b.dataflow_index);
        auto it = matchers_.find(mk);
        if (it == matchers_.end())
            it = matchers_
                     .emplace(mk, EquivalenceMatcher(indexes_[a.dataflow_index],
                                                     indexes_[b.dataflow_index]))
                     .first;
        return it->second.equivalent(a.task_id, b.task_id);
    }

    std::vector<const Dataflow*> dataflows_;
    std::vector<SignatureIndex> indexes_;
    std::vector<Class> classes_;
    std::unordered_map<std::string, std::size_t> class_of_;
    std::map<std::pair<std::size_t, std::size_t>, EquivalenceMatcher> matchers_;
};

} // namespace reflow

#endif // REFLOW_EQUIVALENCE_HPP
