#ifndef REFLOW_SNAPSHOT_HPP
#define REFLOW_SNAPSHOT_HPP

#include <string>

#include <json.hpp>

#include "reflow/json_io.hpp"
#include "reflow/manager.hpp"
#include "reflow/simulator.hpp"

namespace reflow {

// ---------------------------------------------------------------------------
// Manager state snapshot
// ---------------------------------------------------------------------------

inline nlohmann::json state_to_json(const ManagerState& st) {
    nlohmann::json submitted = nlohmann::json::array();
    for (const auto& [name, d] : st.submitted) submitted.push_back(dataflow_to_json(d));
    nlohmann::json running = nlohmann::json::array();
    for (const auto& [name, d] : st.running) running.push_back(dataflow_to_json(d));
    nlohmann::json decomposition = nlohmann::json::object();
    for (const auto& [rname, names] : st.decomposition)
        decomposition[rname] = std::vector<std::string>(names.begin(), names.end());
    nlohmann::json inverse = nlohmann::json::object();
    for (const auto& [name, rname] : st.inverse) inverse[name] = rname;
    nlohmann::json bindings = nlohmann::json::array();
    for (const auto& [key, task] : st.sink_bindings)
        bindings.push_back({{"dataflow", key.first}, {"sink", key.second}, {"task", task}});
    return nlohmann::json{{"submitted", submitted},
                          {"running", running},
                          {"decomposition", decomposition},
                          {"inverse", inverse},
                          {"sink_bindings", bindings},
                          {"next_task_seq", st.next_task_seq},
                          {"next_dag_seq", st.next_dag_seq}};
}

inline ManagerState state_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("state snapshot must be a JSON object");
    ManagerState st;
    for (const auto& doc : j.value("submitted", nlohmann::json::array())) {
        Dataflow d = dataflow_from_json(doc);
        st.submitted.emplace(d.name, std::move(d));
    }
    for (const auto& doc : j.value("running", nlohmann::json::array())) {
        Dataflow d = dataflow_from_json(doc);
        st.running.emplace(d.name, std::move(d));
    }
    if (auto it = j.find("decomposition"); it != j.end())
        for (const auto& [rname, names] : it->items()) {
            std::set<std::string> set;
            for (const auto& n : names) set.insert(n.get<std::string>());
            st.decomposition.emplace(rname, std::move(set));
        }
    if (auto it = j.find("inverse"); it != j.end())
        for (const auto& [name, rname] : it->items())
            st.inverse.emplace(name, rname.get<std::string>());
    for (const auto& b : j.value("sink_bindings", nlohmann::json::array()))
        st.sink_bindings[{b.at("dataflow").get<std::string>(), b.at("sink").get<std::string>()}] =
            b.at("task").get<std::string>();
    st.next_task_seq = j.value("next_task_seq", std::uint64_t{0});
    st.next_dag_seq = j.value("next_dag_seq", std::uint64_t{0});
    return st;
}

// ---------------------------------------------------------------------------
// Deployment snapshot (full physical view, exact reload)
// ---------------------------------------------------------------------------

inline nlohmann::json deployment_to_json(const Deployment& dep) {
    nlohmann::json fragments = nlohmann::json::array();
    for (const auto& f : dep.fragments) {
        nlohmann::json tasks = nlohmann::json::array();
        for (const auto& t : f.tasks)
            tasks.push_back({{"id", t.id}, {"type", t.abstract.type}, {"config", t.abstract.config}});
        nlohmann::json streams = nlohmann::json::array();
        for (const auto& s : f.internal_streams) streams.push_back({{"from", s.from}, {"to", s.to}});
        nlohmann::json topics = nlohmann::json::object();
        for (const auto& [topic, task] : f.inbound_topics) topics[topic] = task;
        fragments.push_back({{"name", f.name},
                             {"launched_at", f.launched_at},
                             {"tasks", tasks},
                             {"streams", streams},
                             {"inbound_topics", topics}});
    }
    nlohmann::json topics = nlohmann::json::array();
    for (const auto& [name, t] : dep.data_topics)
        topics.push_back({{"name", t.name}, {"publisher", t.publisher}, {"subscribers", t.subscribers}});
    nlohmann::json control = nlohmann::json::object();
    for (const auto& [task, queue] : dep.control_topics) {
        nlohmann::json sigs = nlohmann::json::array();
        for (const auto& sig : queue)
            sigs.push_back(sig.kind == ControlSignal::Kind::Forward
                               ? nlohmann::json{{"kind", "forward"}, {"topic", sig.topic}}
                               : nlohmann::json{{"kind", "pause"}});
        if (!sigs.empty()) control[task] = sigs;
    }
    nlohmann::json forwards = nlohmann::json::object();
    for (const auto& [task, list] : dep.active_forwards) forwards[task] = list;
    nlohmann::json state = nlohmann::json::object();
    for (const auto& [task, s] : dep.task_state)
        if (s.window_fill != 0 || s.window_index != 0)
            state[task] = {{"window_fill", s.window_fill}, {"window_index", s.window_index}};
    return nlohmann::json{{"fragments", fragments},
                          {"data_topics", topics},
                          {"control_topics", control},
                          {"active_forwards", forwards},
                          {"paused", std::vector<std::string>(dep.paused.begin(), dep.paused.end())},
                          {"task_state", state},
                          {"clock", dep.clock},
                          {"next_topic_seq", dep.next_topic_seq},
                          {"next_fragment_seq", dep.next_fragment_seq}};
}

inline Deployment deployment_from_json(const nlohmann::json& j) {
    Deployment dep;
    for (const auto& jf : j.value("fragments", nlohmann::json::array())) {
        Fragment f;
        f.name = jf.value("name", "");
        f.launched_at = jf.value("launched_at", std::uint64_t{0});
        for (const auto& jt : jf.value("tasks", nlohmann::json::array()))
            f.tasks.push_back(ConcreteTask{jt.at("id").get<std::string>(),
                                           AbstractTask{jt.at("type").get<std::string>(),
                                                        jt.at("config").get<std::string>()}});
        for (const auto& js : jf.value("streams", nlohmann::json::array()))
            f.internal_streams.push_back(
                Stream{js.at("from").get<std::string>(), js.at("to").get<std::string>()});
        if (auto it = jf.find("inbound_topics"); it != jf.end())
            for (const auto& [topic, task] : it->items())
                f.inbound_topics.emplace(topic, task.get<std::string>());
        dep.fragments.push_back(std::move(f));
    }
    for (const auto& jt : j.value("data_topics", nlohmann::json::array())) {
        DataTopic t;
        t.name = jt.at("name").get<std::string>();
        t.publisher = jt.at("publisher").get<std::string>();
        for (const auto& s : jt.value("subscribers", nlohmann::json::array()))
            t.subscribers.push_back(s.get<std::string>());
        dep.data_topics.emplace(t.name, std::move(t));
    }
    if (auto it = j.find("control_topics"); it != j.end())
        for (const auto& [task, sigs] : it->items())
            for (const auto& js : sigs) {
                ControlSignal sig;
                if (js.value("kind", "") == "forward") {
                    sig.kind = ControlSignal::Kind::Forward;
                    sig.topic = js.value("topic", "");
                } else {
                    sig.kind = ControlSignal::Kind::Pause;
                }
                dep.control_topics[task].push_back(std::move(sig));
            }
    if (auto it = j.find("active_forwards"); it != j.end())
        for (const auto& [task, list] : it->items())
            for (const auto& topic : list) dep.active_forwards[task].push_back(topic.get<std::string>());
    for (const auto& p : j.value("paused", nlohmann::json::array()))
        dep.paused.insert(p.get<std::string>());
    if (auto it = j.find("task_state"); it != j.end())
        for (const auto& [task, s] : it->items())
            dep.task_state[task] = TaskRuntimeState{s.value("window_fill", std::uint64_t{0}),
                                                    s.value("window_index", std::uint64_t{0})};
    dep.clock = j.value("clock", std::uint64_t{0});
    dep.next_topic_seq = j.value("next_topic_seq", std::uint64_t{0});
    dep.next_fragment_seq = j.value("next_fragment_seq", std::uint64_t{0});
    return dep;
}

// ---------------------------------------------------------------------------
// Combined session file used by the CLI
// ---------------------------------------------------------------------------

struct Session {
    ManagerState state;
    Deployment deployment;
};

inline nlohmann::json session_to_json(const Session& s) {
    return nlohmann::json{{"manager", state_to_json(s.state)},
                          {"deployment", deployment_to_json(s.deployment)}};
}

inline Session session_from_json(const nlohmann::json& j) {
    Session s;
    if (auto it = j.find("manager"); it != j.end()) s.state = state_from_json(*it);
    if (auto it = j.find("deployment"); it != j.end()) s.deployment = deployment_from_json(*it);
    return s;
}

} // namespace reflow

#endif // REFLOW_SNAPSHOT_HPP
