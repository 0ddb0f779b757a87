#ifndef REFLOW_CLI_HPP
#define REFLOW_CLI_HPP

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reflow/harness.hpp"
#include "reflow/json_io.hpp"
#include "reflow/snapshot.hpp"

namespace reflow {

namespace cli_detail {

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
}

inline nlohmann::json load_json(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
    return j;
}

/// Advisory lock held while a state file is mutated.
class FileLock {
public:
    explicit FileLock(const std::string& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

inline Session load_session(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return Session{};
    std::string text = read_file(path);
    if (text.empty()) return Session{};
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("state file '" + path + "' is not valid JSON");
    return session_from_json(j);
}

inline void save_session(const std::string& path, const Session& s) {
    write_file(path, session_to_json(s).dump(2) + "\n");
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline void print_merge_plan(std::ostream& out, const MergePlan& plan) {
    out << "submitted: " << plan.submitted_name << "\n";
    out << "running DAG: " << plan.result_name << "\n";
    out << "absorbed (" << plan.absorbed.size() << "):";
    for (const auto& n : plan.absorbed) out << " " << n;
    out << "\n";
    out << "reused tasks (" << plan.reused_tasks.size() << "):";
    for (const auto& id : plan.reused_tasks) out << " " << id;
    out << "\n";
    out << "new tasks (" << plan.new_tasks.size() << "):";
    for (const auto& t : plan.new_tasks) out << " " << t.id;
    out << "\n";
    out << "internal streams (" << plan.internal_streams.size() << "):";
    for (const auto& s : plan.internal_streams) out << " " << s.from << ">" << s.to;
    out << "\n";
    out << "boundary streams (" << plan.boundary_streams.size() << "):";
    for (const auto& s : plan.boundary_streams) out << " " << s.from << ">" << s.to;
    out << "\n";
}

inline void print_unmerge_plan(std::ostream& out, const UnmergePlan& plan) {
    out << "removed: " << plan.removed_name << "\n";
    out << "affected running DAG: " << plan.affected << "\n";
    out << "terminated tasks (" << plan.terminated_tasks.size() << "):";
    for (const auto& id : plan.terminated_tasks) out << " " << id;
    out << "\n";
    out << "disconnected streams (" << plan.disconnected_streams.size() << "):";
    for (const auto& s : plan.disconnected_streams) out << " " << s.from << ">" << s.to;
    out << "\n";
    out << "components (" << plan.components.size() << "):";
    for (const auto& c : plan.components) out << " " << c.name << "[" << c.tasks.size() << " tasks]";
    out << "\n";
}

} // namespace cli_detail

/// CLI entry point. Returns the process exit code: 0 success, 1 validation
/// failure, 2 usage error, 3 internal constraint violation.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"reusable streaming dataflow manager"};
    app.require_subcommand(1);

    // validate
    std::string v_file;
    auto* validate_cmd = app.add_subcommand("validate", "check a dataflow document");
    validate_cmd->add_option("file", v_file, "dataflow JSON document")->required();

    // diff
    std::string d_a, d_b;
    auto* diff_cmd = app.add_subcommand("diff", "show the maximal ancestor intersection of two dataflows");
    diff_cmd->add_option("a", d_a)->required();
    diff_cmd->add_option("b", d_b)->required();

    // submit
    std::string s_state, s_file;
    auto* submit_cmd = app.add_subcommand("submit", "submit a dataflow into a state file");
    submit_cmd->add_option("--state", s_state, "state file")->required();
    submit_cmd->add_option("file", s_file, "dataflow JSON document")->required();

    // remove
    std::string r_state, r_name;
    auto* remove_cmd = app.add_subcommand("remove", "remove a submitted dataflow from a state file");
    remove_cmd->add_option("--state", r_state, "state file")->required();
    remove_cmd->add_option("name", r_name, "submitted dataflow name")->required();

    // status
    std::string st_state;
    auto* status_cmd = app.add_subcommand("status", "print manager and deployment status");
    status_cmd->add_option("--state", st_state, "state file")->required();

    // replay
    std::string rp_workload, rp_trace, rp_mode = "both", rp_out = ".";
    std::size_t rp_events = 10, rp_oracle = 1;
    bool rp_no_consistency = false, rp_check_min = false, rp_no_sim = false;
    auto* replay_cmd = app.add_subcommand("replay", "replay a trace and write metric CSVs");
    replay_cmd->add_option("--workload", rp_workload)->required();
    replay_cmd->add_option("--trace", rp_trace)->required();
    replay_cmd->add_option("--mode", rp_mode)->check(CLI::IsMember({"default", "reuse", "both"}));
    replay_cmd->add_option("--out", rp_out, "output directory");
    replay_cmd->add_option("--events-per-step", rp_events);
    replay_cmd->add_option("--oracle-every", rp_oracle);
    replay_cmd->add_flag("--no-consistency", rp_no_consistency, "skip the output-consistency oracle");
    replay_cmd->add_flag("--check-minimality", rp_check_min, "rebuild-from-scratch after every action");
    replay_cmd->add_flag("--no-simulate", rp_no_sim, "skip event simulation");

    // gen-workload
    std::string gw_spec, gw_preset, gw_out;
    std::uint64_t gw_seed = 0;
    bool gw_seed_set = false;
    auto* genw_cmd = app.add_subcommand("gen-workload", "generate a synthetic workload");
    genw_cmd->add_option("--spec", gw_spec, "workload spec JSON");
    genw_cmd->add_option("--preset", gw_preset)->check(CLI::IsMember({"opmw-like"}));
    genw_cmd->add_option("--seed", gw_seed)->each([&](const std::string&) { gw_seed_set = true; });
    genw_cmd->add_option("--out", gw_out, "output workload file")->required();

    // gen-trace
    std::string gt_workload, gt_kind = "seq", gt_out;
    std::uint64_t gt_seed = 1;
    std::size_t gt_rw_steps = 100;
    double gt_fill = 2.0 / 3.0;
    auto* gent_cmd = app.add_subcommand("gen-trace", "generate a submit/remove trace");
    gent_cmd->add_option("--workload", gt_workload)->required();
    gent_cmd->add_option("--kind", gt_kind)->check(CLI::IsMember({"seq", "rw"}));
    gent_cmd->add_option("--seed", gt_seed);
    gent_cmd->add_option("--rw-steps", gt_rw_steps);
    gent_cmd->add_option("--initial-fill", gt_fill);
    gent_cmd->add_option("--out", gt_out, "output trace file")->required();

    try {
        std::vector<const char*> argv;
        argv.push_back("reflow");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*validate_cmd) {
            Dataflow d = dataflow_from_json(cli_detail::load_json(v_file));
            ValidationReport report = validate(d);
            if (report.ok()) {
                out << "ok: " << d.name << " (" << d.tasks.size() << " tasks, " << d.streams.size()
                    << " streams)\n";
                return 0;
            }
            for (const auto& v : report.violations)
                out << to_string(v.kind) << ": " << v.message << "\n";
            return 1;
        }

        if (*diff_cmd) {
            Dataflow a = parse_dataflow(cli_detail::read_file(d_a));
            Dataflow b = parse_dataflow(cli_detail::read_file(d_b));
            auto shared = ancestor_intersection(a, b);
            auto maximal = maximal_ancestor_set(shared);
            if (shared.empty()) {
                out << "disjoint: no shared task classes\n";
                return 0;
            }
            out << "shared task classes: " << shared.size() << "\n";
            out << "deepest reuse points (" << maximal.size() << "):\n";
            for (const auto& g : maximal) {
                const ConcreteTask& root = a.task_at(g.root);
                out << "  " << g.root << " (type=" << root.abstract.type
                    << ", tasks=" << g.tasks.size() << ")\n";
            }
            return 0;
        }

        if (*submit_cmd) {
            cli_detail::FileLock lock(s_state);
            Session session = cli_detail::load_session(s_state);
            Dataflow d = parse_dataflow(cli_detail::read_file(s_file));
            auto [next, plan] = submit(session.state, d);
            session.state = std::move(next);
            session.deployment.apply_merge(plan);
            cli_detail::save_session(s_state, session);
            cli_detail::print_merge_plan(out, plan);
            for (const auto& sink : session.state.submitted.at(d.name).sink_ids())
                out << "sink binding: " << sink << " -> "
                    << session.state.sink_bindings.at({d.name, sink}) << "\n";
            return 0;
        }

        if (*remove_cmd) {
            cli_detail::FileLock lock(r_state);
            Session session = cli_detail::load_session(r_state);
            auto [next, plan] = remove(session.state, r_name);
            session.state = std::move(next);
            session.deployment.apply_unmerge(plan);
            cli_detail::save_session(r_state, session);
            cli_detail::print_unmerge_plan(out, plan);
            return 0;
        }

        if (*status_cmd) {
            Session session = cli_detail::load_session(st_state);
            const ManagerState& st = session.state;
            out << "submitted (" << st.submitted.size() << "):";
            for (const auto& [name, d] : st.submitted) out << " " << name;
            out << "\n";
            out << "running DAGs (" << st.running.size() << "):\n";
            for (const auto& [rname, R] : st.running) {
                out << "  " << rname << ": " << R.tasks.size() << " tasks, " << R.streams.size()
                    << " streams, serves";
                for (const auto& n : st.decomposition.at(rname)) out << " " << n;
                out << "\n";
            }
            out << "fragments (" << session.deployment.fragment_count() << "):\n";
            for (const auto& f : session.deployment.fragments)
                out << "  " << f.name << ": " << f.tasks.size() << " tasks (launched at "
                    << f.launched_at << ")\n";
            out << "paused tasks: " << session.deployment.paused_count() << "\n";
            out << "active tasks: " << session.deployment.active_task_count() << "\n";
            out << "cost: " << cli_detail::fmt(session.deployment.cost()) << "\n";
            ConstraintReport report = check_constraints(st);
            if (report.ok()) {
                out << "constraints: ok\n";
                return 0;
            }
            out << "constraints: " << report.issues.size() << " issue(s)\n";
            for (const auto& issue : report.issues)
                out << "  " << to_string(issue.kind) << ": " << issue.message << "\n";
            return 3;
        }

        if (*replay_cmd) {
            auto workload = workload_from_json(cli_detail::load_json(rp_workload));
            Trace trace = trace_from_json(cli_detail::load_json(rp_trace));
            ReplayOptions options;
            options.events_per_step = rp_events;
            options.oracle_every = rp_oracle;
            options.check_outputs = !rp_no_consistency;
            options.check_minimality = rp_check_min;
            options.simulate = !rp_no_sim;

            std::filesystem::create_directories(rp_out);
            std::vector<ReplayResult> results;
            if (rp_mode == "default" || rp_mode == "both")
                results.push_back(replay(workload, trace, ReplayMode::Default, options));
            if (rp_mode == "reuse" || rp_mode == "both")
                results.push_back(replay(workload, trace, ReplayMode::Reuse, options));

            std::vector<const ReplayResult*> ptrs;
            for (const auto& r : results) ptrs.push_back(&r);
            std::ofstream metrics(rp_out + "/metrics.csv");
            write_metrics_csv(metrics, ptrs);
            out << "wrote " << rp_out << "/metrics.csv\n";

            for (const auto& r : results) {
                if (r.mode != ReplayMode::Reuse) continue;
                std::ofstream hist(rp_out + "/histogram.csv");
                write_histogram_csv(hist, reuse_histogram(r));
                out << "wrote " << rp_out << "/histogram.csv\n";
            }

            if (results.size() == 2) {
                auto series = combine_series(results[0], results[1]);
                for (const auto& m : series)
                    if (m.running_tasks_reuse > m.running_tasks_default)
                        throw ConstraintViolationError(
                            "reuse ran more tasks than default at step " + std::to_string(m.step));
                std::size_t peak_def = 0, peak_reuse = 0;
                for (const auto& m : series) {
                    peak_def = std::max(peak_def, m.running_tasks_default);
                    peak_reuse = std::max(peak_reuse, m.running_tasks_reuse);
                }
                out << "peak running tasks: default=" << peak_def << " reuse=" << peak_reuse << "\n";
            }
            return 0;
        }

        if (*genw_cmd) {
            WorkloadSpec spec;
            if (!gw_preset.empty())
                spec = opmw_like_spec();
            else if (!gw_spec.empty())
                spec = workload_spec_from_json(cli_detail::load_json(gw_spec));
            else
                throw cli_detail::UsageError("gen-workload needs --spec or --preset");
            if (gw_seed_set) spec.seed = gw_seed;
            auto workload = generate_workload(spec);
            cli_detail::write_file(gw_out, workload_to_json(workload, &spec).dump(2) + "\n");
            std::size_t total = 0;
            for (const auto& d : workload) total += d.tasks.size();
            out << "wrote " << gw_out << ": " << workload.size() << " dataflows, " << total
                << " tasks\n";
            return 0;
        }

        if (*gent_cmd) {
            auto workload = workload_from_json(cli_detail::load_json(gt_workload));
            Trace trace = generate_trace(workload,
                                         gt_kind == "seq" ? Trace::Kind::Seq : Trace::Kind::Rw,
                                         gt_seed, gt_rw_steps, gt_fill);
            cli_detail::write_file(gt_out, trace_to_json(trace).dump(2) + "\n");
            out << "wrote " << gt_out << ": " << trace.actions.size() << " actions\n";
            return 0;
        }
    } catch (const cli_detail::UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintViolationError& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "json error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace reflow

#endif // REFLOW_CLI_HPP
