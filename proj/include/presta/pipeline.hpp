#pragma once

#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "presta/at_provider.hpp"
#include "presta/common.hpp"
#include "presta/liberty.hpp"
#include "presta/metrics.hpp"
#include "presta/physical.hpp"
#include "presta/sdc.hpp"
#include "presta/sdf.hpp"
#include "presta/slack_engine.hpp"
#include "presta/timing_graph.hpp"

namespace presta {

struct RunConfig {
    std::vector<std::string> lib_early;
    std::vector<std::string> lib_late;
    std::string def_path;
    std::string sdc_path;
    std::string sdf_path;
    std::string labels_path;
    std::string predictions_path;
    std::string at_source = "propagate";  // labels | external | propagate
    size_t lut_rows = 7, lut_cols = 7;
    std::string out_graph;
    std::string out_report_text;
    std::string out_report_json;
    bool strict_labels = true;
    double net_delay_per_micron = 0.0;
    double pi_slew = 0.05;
    bool clock_early_min_rf = false;
    bool fail_on_wns = true;
    int jobs = 0;  // 0 = hardware concurrency
};

struct PhaseTimes {
    double parse_s = 0, graph_s = 0, at_s = 0, slack_s = 0, total_s = 0;
};

struct PipelineResult {
    LibrarySet libs;
    PhysicalDesign design;
    SdcConstraints sdc;
    DelayLabels labels;
    TimingGraph graph;
    PinTiming timing;
    SlackReport report;
    PhaseTimes times;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgError("cannot write file: " + path);
    out << content;
}

namespace pipeline_detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
auto wrap_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(std::string(stage) + ": " + e.what());
    } catch (const ArgError& e) {
        throw ArgError(std::string(stage) + ": " + e.what());
    }
}

}  // namespace pipeline_detail

// Parse all input files. Independent files run concurrently, bounded by
// config.jobs; the merge into LibrarySet is sequential and keyed by cell
// name, so the result is independent of scheduling.
inline void parse_inputs(const RunConfig& config, PipelineResult& r) {
    unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                    : std::max(1u, std::thread::hardware_concurrency());

    struct LibJob {
        std::string path;
        bool late;
    };
    std::vector<LibJob> lib_jobs;
    for (const auto& p : config.lib_early) lib_jobs.push_back({p, false});
    for (const auto& p : config.lib_late) lib_jobs.push_back({p, true});

    // bounded fan-out over library files; merged afterwards in declaration
    // order so the result does not depend on scheduling
    std::vector<LibertyLibrary> parsed(lib_jobs.size());
    {
        std::vector<std::future<void>> futs;
        std::atomic<size_t> cursor{0};
        unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(lib_jobs.size()));
        for (unsigned w = 0; w < workers; ++w) {
            futs.push_back(std::async(std::launch::async, [&]() {
                for (;;) {
                    size_t i = cursor.fetch_add(1);
                    if (i >= lib_jobs.size()) return;
                    parsed[i] = pipeline_detail::wrap_stage("liberty", [&]() {
                        return parse_liberty(read_file(lib_jobs[i].path));
                    });
                }
            }));
        }
        for (auto& f : futs) f.get();
    }
    for (size_t i = 0; i < lib_jobs.size(); ++i) {
        auto& target = lib_jobs[i].late ? r.libs.late : r.libs.early;
        for (auto& [name, cell] : parsed[i].cells) target[name] = std::move(cell);
    }

    auto def_fut = std::async(std::launch::async, [&]() {
        return pipeline_detail::wrap_stage("def", [&]() {
            return parse_def(read_file(config.def_path));
        });
    });
    std::future<SdcConstraints> sdc_fut;
    if (!config.sdc_path.empty())
        sdc_fut = std::async(std::launch::async, [&]() {
            return pipeline_detail::wrap_stage("sdc", [&]() {
                return parse_sdc(read_file(config.sdc_path));
            });
        });
    std::future<DelayLabels> sdf_fut;
    if (!config.sdf_path.empty())
        sdf_fut = std::async(std::launch::async, [&]() {
            return pipeline_detail::wrap_stage("sdf", [&]() {
                return parse_sdf(read_file(config.sdf_path));
            });
        });
    std::future<DelayLabels> label_fut;
    if (!config.labels_path.empty())
        label_fut = std::async(std::launch::async, [&]() {
            return pipeline_detail::wrap_stage("labels", [&]() {
                return parse_label_sidecar(read_file(config.labels_path));
            });
        });

    r.design = def_fut.get();
    if (sdc_fut.valid()) r.sdc = sdc_fut.get();
    if (sdf_fut.valid()) merge_labels(r.labels, sdf_fut.get());
    if (label_fut.valid()) merge_labels(r.labels, label_fut.get());
}

inline void build_phase(const RunConfig& config, PipelineResult& r) {
    r.design = resolve_net_drivers(std::move(r.design), r.libs);
    r.graph = build_graph(r.design, r.libs, config.lut_rows, config.lut_cols);
    remove_cycles(r.graph);
    compute_levels(r.graph);
}

inline void at_phase(const RunConfig& config, PipelineResult& r) {
    PropagateOptions popt;
    popt.default_pi_slew = config.pi_slew;
    popt.net_delay_per_micron = config.net_delay_per_micron;
    popt.clock_early_min_rf = config.clock_early_min_rf;
    if (config.at_source == "labels") {
        r.timing = at_from_labels(r.graph, r.labels, config.strict_labels, config.pi_slew);
    } else if (config.at_source == "external") {
        r.timing = at_from_external(r.graph, read_file(config.predictions_path),
                                    config.strict_labels, config.pi_slew);
    } else if (config.at_source == "propagate") {
        r.timing = propagate_at(r.graph, r.sdc, popt);
    } else {
        throw ArgError("unknown at source: " + config.at_source);
    }
}

inline void slack_phase(const RunConfig& config, PipelineResult& r) {
    SlackOptions opt;
    opt.clock_early_min_rf = config.clock_early_min_rf;
    opt.prop.default_pi_slew = config.pi_slew;
    opt.prop.net_delay_per_micron = config.net_delay_per_micron;
    r.report = compute_slack(r.graph, r.timing, r.sdc, opt);
    r.report.lut_rows = config.lut_rows;
    r.report.lut_cols = config.lut_cols;
}

// parse + graph build only (the `parse` subcommand)
inline PipelineResult run_pipeline_parse_only(const RunConfig& config) {
    PipelineResult r;
    auto t0 = std::chrono::steady_clock::now();
    parse_inputs(config, r);
    r.times.parse_s = pipeline_detail::seconds_since(t0);
    auto t1 = std::chrono::steady_clock::now();
    build_phase(config, r);
    r.times.graph_s = pipeline_detail::seconds_since(t1);
    r.times.total_s = pipeline_detail::seconds_since(t0);
    return r;
}

inline PipelineResult run_pipeline(const RunConfig& config) {
    PipelineResult r;
    auto t0 = std::chrono::steady_clock::now();
    parse_inputs(config, r);
    r.times.parse_s = pipeline_detail::seconds_since(t0);
    auto t1 = std::chrono::steady_clock::now();
    build_phase(config, r);
    r.times.graph_s = pipeline_detail::seconds_since(t1);
    auto t2 = std::chrono::steady_clock::now();
    at_phase(config, r);
    r.times.at_s = pipeline_detail::seconds_since(t2);
    auto t3 = std::chrono::steady_clock::now();
    slack_phase(config, r);
    r.times.slack_s = pipeline_detail::seconds_since(t3);
    r.times.total_s = pipeline_detail::seconds_since(t0);
    return r;
}

inline size_t live_edge_count(const std::vector<char>& removed) {
    size_t n = 0;
    for (char c : removed) n += (c == 0);
    return n;
}

inline std::string stats_line(const PipelineResult& r) {
    std::ostringstream os;
    os << "nodes=" << r.graph.nodes.size()
       << " cell_edges=" << live_edge_count(r.graph.cell_edge_removed)
       << " net_edges=" << live_edge_count(r.graph.net_edge_removed)
       << " endpoints=" << r.graph.endpoints.size();
    os.setf(std::ios::fixed);
    os.precision(3);
    os << " parse_s=" << r.times.parse_s << " graph_s=" << r.times.graph_s
       << " at_s=" << r.times.at_s << " slack_s=" << r.times.slack_s
       << " total_s=" << r.times.total_s;
    return os.str();
}

}  // namespace presta
