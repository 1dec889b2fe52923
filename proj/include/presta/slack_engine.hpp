#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "presta/at_provider.hpp"
#include "presta/common.hpp"
#include "presta/sdc.hpp"
#include "presta/timing_graph.hpp"

namespace presta {

struct EndpointResult {
    int endpoint = -1;
    std::string name;
    bool is_po = false;
    bool constrained = true;
    double at = 0.0;   // late-rise
    double rat = 0.0;
    double crp = 0.0;
    double rat_corrected = 0.0;
    double slack = 0.0;
    double slack_corrected = 0.0;
    int startpoint = -1;
    std::vector<int> critical_path;  // endpoint..startpoint order when critical
};

struct SlackReport {
    std::vector<EndpointResult> endpoints;
    double tns = 0.0;
    double wns = 0.0;
    int endpoint_count = 0;
    int critical_count = 0;
    int unconstrained_count = 0;
    // analysis settings echo
    double clock_period = 0.0;
    double clock_uncertainty = 0.0;
    size_t lut_rows = 7, lut_cols = 7;
    std::string at_source = "propagated";
    std::vector<std::string> warnings;
};

struct SlackOptions {
    bool clock_early_min_rf = false;  // min(ER,EF) at clock pins instead of ER
    PropagateOptions prop;            // arc-delay model for backward walks
};

namespace slack_detail {

inline double clock_early_at(const PinTiming& t, int node, const SlackOptions& opt) {
    const FourCorner& at = t.at[static_cast<size_t>(node)];
    return opt.clock_early_min_rf ? std::min(at[ER], at[EF]) : at[ER];
}

inline double clock_late_at(const PinTiming& t, int node, const SlackOptions& opt) {
    const FourCorner& at = t.at[static_cast<size_t>(node)];
    return opt.clock_early_min_rf ? std::max(at[LR], at[LF]) : at[LR];
}

// clock pin of the instance owning `node`, or -1
inline int instance_clock_pin(const TimingGraph& g, int node) {
    int comp = g.nodes[static_cast<size_t>(node)].component;
    if (comp < 0) return -1;
    // pins of an instance are contiguous in the node array
    int i = node;
    while (i > 0 && g.nodes[static_cast<size_t>(i - 1)].component == comp) --i;
    for (; i < static_cast<int>(g.nodes.size()) &&
           g.nodes[static_cast<size_t>(i)].component == comp;
         ++i)
        if (g.nodes[static_cast<size_t>(i)].is_clock_pin) return i;
    return -1;
}

}  // namespace slack_detail

// RAT per endpoint. PO: T - D^PO - mu. Register data pin: T + early clock
// AT at the instance clock pin - mu (setup time deliberately excluded).
inline std::map<int, double> estimate_rat(const TimingGraph& graph, const PinTiming& timing,
                                          const SdcConstraints& sdc,
                                          const SlackOptions& opt = {},
                                          std::vector<int>* unconstrained = nullptr) {
    std::map<int, double> rats;
    for (int ep : graph.endpoints) {
        const PinNode& node = graph.nodes[static_cast<size_t>(ep)];
        if (node.is_port) {
            rats[ep] = sdc.clock_period - sdc.output_delay(node.name) - sdc.clock_uncertainty;
        } else {
            int clk = slack_detail::instance_clock_pin(graph, ep);
            if (clk < 0) {
                if (unconstrained) unconstrained->push_back(ep);
                continue;
            }
            double d_early = slack_detail::clock_early_at(timing, clk, opt);
            rats[ep] = sdc.clock_period + d_early - sdc.clock_uncertainty;
        }
    }
    return rats;
}

// Backward walk from a violating endpoint: at each pin pick the forward
// predecessor maximizing AT_LR(p) + arc_delay_LR(p->pin), ties by lowest
// node id; stop at a clock pin or a primary input. Path is endpoint-first.
inline std::vector<int> backward_traversal_till_clk(const TimingGraph& graph,
                                                    const PinTiming& timing, int endpoint,
                                                    const SlackOptions& opt = {}) {
    std::vector<int> path{endpoint};
    int current = endpoint;
    size_t guard = graph.nodes.size() + 1;
    while (true) {
        if (path.size() > guard)
            throw InternalError("backward traversal exceeded node count (corrupt graph?)");
        const PinNode& node = graph.nodes[static_cast<size_t>(current)];
        if (node.is_clock_pin) break;
        if (node.is_port && node.is_fanout) break;  // primary input
        const auto& preds = graph.bwd[static_cast<size_t>(current)];
        if (preds.empty()) break;
        int best = -1;
        double best_val = 0.0;
        for (const auto& e : preds) {
            double val = timing.at[static_cast<size_t>(e.other)][LR] +
                         arc_delay_late_rise(graph, timing, e, opt.prop);
            if (best < 0 || val > best_val + 1e-15 ||
                (std::abs(val - best_val) <= 1e-15 && e.other < best)) {
                best = e.other;
                best_val = val;
            }
        }
        path.push_back(best);
        current = best;
    }
    return path;
}

inline std::vector<std::pair<int, std::vector<int>>> find_critical_paths(
    const TimingGraph& graph, const PinTiming& timing, const std::map<int, double>& rats,
    const SlackOptions& opt = {}) {
    std::vector<std::pair<int, std::vector<int>>> out;
    for (const auto& [ep, rat] : rats) {
        double slack = rat - timing.at[static_cast<size_t>(ep)][LR];
        if (slack < 0)
            out.emplace_back(ep, backward_traversal_till_clk(graph, timing, ep, opt));
    }
    return out;
}

namespace slack_detail {

// walk backward from a register clock pin to the clock source through net
// edges and single-input-cell arcs; returns source..clock-pin order, with
// `complete` false when the walk hit a multi-input cell (clock gate) or ran
// out of predecessors before reaching the clock source
struct ClockPath {
    std::vector<int> pins;  // clock source first
    bool complete = false;
};

inline ClockPath get_clock_path(const TimingGraph& graph, int clock_pin, int clock_source,
                                std::vector<std::string>* warnings = nullptr) {
    ClockPath cp;
    std::vector<int> rev{clock_pin};
    int current = clock_pin;
    size_t guard = graph.nodes.size() + 1;
    while (current != clock_source) {
        if (rev.size() > guard) break;
        const auto& preds = graph.bwd[static_cast<size_t>(current)];
        if (preds.empty()) break;
        int next = -1;
        if (preds.size() == 1 && !preds[0].is_cell) {
            next = preds[0].other;  // net edge back to the driver
        } else {
            // output pin of a buffer/inverter-like cell: follow its single
            // cell arc input
            std::vector<int> cell_preds;
            for (const auto& e : preds)
                if (e.is_cell) cell_preds.push_back(e.other);
            std::sort(cell_preds.begin(), cell_preds.end());
            cell_preds.erase(std::unique(cell_preds.begin(), cell_preds.end()),
                             cell_preds.end());
            if (cell_preds.size() == 1) {
                next = cell_preds[0];
            } else if (!preds[0].is_cell && preds.size() == 1) {
                next = preds[0].other;
            } else {
                if (warnings)
                    warnings->push_back("clock path through multi-input cell at " +
                                        graph.nodes[static_cast<size_t>(current)].name +
                                        "; truncating walk");
                break;
            }
        }
        rev.push_back(next);
        current = next;
    }
    cp.complete = (current == clock_source);
    cp.pins.assign(rev.rbegin(), rev.rend());
    return cp;
}

}  // namespace slack_detail

// CRP for one critical path: startpoint is the first register output along
// the path from the launch end; CRP = late - early AT at the last pin the
// launch and capture clock paths share (the clock source has AT 0, so the
// AT difference equals max minus min delay of the common segment).
inline double crpr_for_endpoint(const TimingGraph& graph, const PinTiming& timing,
                                int endpoint, const std::vector<int>& path,
                                const SdcConstraints& sdc, const SlackOptions& opt = {},
                                int* startpoint_out = nullptr,
                                std::vector<std::string>* warnings = nullptr) {
    int clock_source = graph.find_node(sdc.clock_port);
    // path is endpoint-first; launch end is the back
    int launch_end = path.empty() ? endpoint : path.back();

    // first register output walking forward from the launch end
    int startpoint = launch_end;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const PinNode& n = graph.nodes[static_cast<size_t>(*it)];
        if (!n.is_port && n.is_fanout && n.component >= 0) {
            // register output right after the launch clock pin
            startpoint = *it;
            break;
        }
        if (n.is_port) {
            startpoint = *it;  // PI launch
            break;
        }
    }
    if (startpoint_out) *startpoint_out = startpoint;

    if (clock_source < 0) {
        if (warnings) warnings->push_back("clock source port not found in graph; CRP = 0");
        return 0.0;
    }

    // launch clock pin: clock pin of the startpoint's instance (when the
    // path launches from a register); PI startpoints have no launch clock
    int launch_clk = -1;
    if (!graph.nodes[static_cast<size_t>(startpoint)].is_port)
        launch_clk = slack_detail::instance_clock_pin(graph, startpoint);
    if (!path.empty() && graph.nodes[static_cast<size_t>(path.back())].is_clock_pin)
        launch_clk = path.back();

    int capture_clk = -1;
    if (!graph.nodes[static_cast<size_t>(endpoint)].is_port)
        capture_clk = slack_detail::instance_clock_pin(graph, endpoint);

    if (launch_clk < 0 || capture_clk < 0) return 0.0;

    auto lp = slack_detail::get_clock_path(graph, launch_clk, clock_source, warnings);
    auto cp = slack_detail::get_clock_path(graph, capture_clk, clock_source, warnings);
    if (lp.pins.empty() || cp.pins.empty()) return 0.0;
    if (!lp.complete || !cp.complete) {
        if (warnings)
            warnings->push_back("clock pin unreachable from clock source for endpoint " +
                                graph.nodes[static_cast<size_t>(endpoint)].name +
                                "; CRP = 0");
        return 0.0;
    }

    size_t common = 0;
    while (common < lp.pins.size() && common < cp.pins.size() &&
           lp.pins[common] == cp.pins[common])
        ++common;
    if (common == 0) return 0.0;
    int last_common = lp.pins[common - 1];
    double crp = slack_detail::clock_late_at(timing, last_common, opt) -
                 slack_detail::clock_early_at(timing, last_common, opt);
    return std::max(crp, 0.0);
}

inline void compute_tns_wns(SlackReport& report) {
    report.tns = 0.0;
    report.wns = 0.0;
    report.critical_count = 0;
    for (const auto& ep : report.endpoints) {
        if (!ep.constrained) continue;
        if (ep.slack_corrected < 0) {
            report.tns += ep.slack_corrected;
            report.wns = std::min(report.wns, ep.slack_corrected);
            ++report.critical_count;
        }
    }
}

// Full Algorithm: RAT per endpoint, critical screening with uncorrected
// slack, CRPR on the critical set only, TNS/WNS over corrected slacks.
inline SlackReport compute_slack(const TimingGraph& graph, const PinTiming& timing,
                                 const SdcConstraints& sdc, const SlackOptions& opt = {}) {
    SlackReport report;
    report.clock_period = sdc.clock_period;
    report.clock_uncertainty = sdc.clock_uncertainty;
    switch (timing.source) {
        case AtSource::Labels: report.at_source = "labels"; break;
        case AtSource::External: report.at_source = "external"; break;
        case AtSource::Propagated: report.at_source = "propagated"; break;
    }

    std::vector<int> unconstrained;
    auto rats = estimate_rat(graph, timing, sdc, opt, &unconstrained);
    report.unconstrained_count = static_cast<int>(unconstrained.size());
    for (int ep : unconstrained) {
        EndpointResult r;
        r.endpoint = ep;
        r.name = graph.nodes[static_cast<size_t>(ep)].name;
        r.constrained = false;
        r.at = timing.at[static_cast<size_t>(ep)][LR];
        report.endpoints.push_back(std::move(r));
        report.warnings.push_back("endpoint " +
                                  graph.nodes[static_cast<size_t>(ep)].name +
                                  " has no clock pin; excluded from TNS/WNS");
    }

    for (const auto& [ep, rat] : rats) {
        EndpointResult r;
        r.endpoint = ep;
        r.name = graph.nodes[static_cast<size_t>(ep)].name;
        r.is_po = graph.nodes[static_cast<size_t>(ep)].is_port;
        r.at = timing.at[static_cast<size_t>(ep)][LR];
        r.rat = rat;
        r.slack = rat - r.at;
        r.crp = 0.0;
        if (r.slack < 0) {
            r.critical_path = backward_traversal_till_clk(graph, timing, ep, opt);
            int sp = -1;
            r.crp = crpr_for_endpoint(graph, timing, ep, r.critical_path, sdc, opt, &sp,
                                      &report.warnings);
            r.startpoint = sp;
        }
        r.rat_corrected = r.rat + r.crp;
        r.slack_corrected = r.rat_corrected - r.at;
        report.endpoints.push_back(std::move(r));
    }
    report.endpoint_count = static_cast<int>(graph.endpoints.size());
    std::sort(report.endpoints.begin(), report.endpoints.end(),
              [](const EndpointResult& a, const EndpointResult& b) {
                  return a.endpoint < b.endpoint;
              });
    compute_tns_wns(report);
    return report;
}

// ---- reports ---------------------------------------------------------------

inline std::string generate_text_report(const SlackReport& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "TNS " << r.tns << " WNS " << r.wns << "\n";
    os << "endpoints " << r.endpoint_count << " critical " << r.critical_count
       << " unconstrained " << r.unconstrained_count << "\n";
    os << "settings T=" << r.clock_period << " mu=" << r.clock_uncertainty << " lut="
       << r.lut_rows << "x" << r.lut_cols << " at_source=" << r.at_source << "\n";
    std::vector<const EndpointResult*> critical;
    for (const auto& ep : r.endpoints)
        if (ep.constrained && ep.slack_corrected < 0) critical.push_back(&ep);
    std::sort(critical.begin(), critical.end(),
              [](const EndpointResult* a, const EndpointResult* b) {
                  if (a->slack_corrected != b->slack_corrected)
                      return a->slack_corrected < b->slack_corrected;
                  return a->endpoint < b->endpoint;
              });
    if (!critical.empty())
        os << "endpoint AT RAT CRP slack\n";
    for (const auto* ep : critical)
        os << ep->name << " " << ep->at << " " << ep->rat_corrected << " " << ep->crp << " "
           << ep->slack_corrected << "\n";
    return os.str();
}

inline nlohmann::json report_to_json(const SlackReport& r) {
    nlohmann::json j;
    j["schema"] = "presta-slack-report";
    j["version"] = 1;
    j["tns"] = r.tns;
    j["wns"] = r.wns;
    j["endpoint_count"] = r.endpoint_count;
    j["critical_count"] = r.critical_count;
    j["unconstrained_count"] = r.unconstrained_count;
    j["settings"] = {{"clock_period", r.clock_period},
                     {"clock_uncertainty", r.clock_uncertainty},
                     {"lut_rows", r.lut_rows},
                     {"lut_cols", r.lut_cols},
                     {"at_source", r.at_source}};
    auto& eps = j["endpoints"] = nlohmann::json::array();
    for (const auto& ep : r.endpoints) {
        eps.push_back({{"id", ep.endpoint},
                       {"name", ep.name},
                       {"is_po", ep.is_po},
                       {"constrained", ep.constrained},
                       {"at", ep.at},
                       {"rat", ep.rat},
                       {"crp", ep.crp},
                       {"rat_corrected", ep.rat_corrected},
                       {"slack", ep.slack},
                       {"slack_corrected", ep.slack_corrected},
                       {"startpoint", ep.startpoint}});
    }
    return j;
}

inline SlackReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "presta-slack-report")
        throw ParseError("slack report: wrong or missing schema id");
    SlackReport r;
    r.tns = j["tns"].get<double>();
    r.wns = j["wns"].get<double>();
    r.endpoint_count = j["endpoint_count"].get<int>();
    r.critical_count = j["critical_count"].get<int>();
    r.unconstrained_count = j["unconstrained_count"].get<int>();
    r.clock_period = j["settings"]["clock_period"].get<double>();
    r.clock_uncertainty = j["settings"]["clock_uncertainty"].get<double>();
    r.lut_rows = j["settings"]["lut_rows"].get<size_t>();
    r.lut_cols = j["settings"]["lut_cols"].get<size_t>();
    r.at_source = j["settings"]["at_source"].get<std::string>();
    for (const auto& je : j["endpoints"]) {
        EndpointResult ep;
        ep.endpoint = je["id"].get<int>();
        ep.name = je["name"].get<std::string>();
        ep.is_po = je["is_po"].get<bool>();
        ep.constrained = je["constrained"].get<bool>();
        ep.at = je["at"].get<double>();
        ep.rat = je["rat"].get<double>();
        ep.crp = je["crp"].get<double>();
        ep.rat_corrected = je["rat_corrected"].get<double>();
        ep.slack = je["slack"].get<double>();
        ep.slack_corrected = je["slack_corrected"].get<double>();
        ep.startpoint = je["startpoint"].get<int>();
        r.endpoints.push_back(std::move(ep));
    }
    return r;
}

}  // namespace presta
