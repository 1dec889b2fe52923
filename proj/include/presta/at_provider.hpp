#pragma once

#include <string>
#include <vector>

#include "presta/common.hpp"
#include "presta/sdc.hpp"
#include "presta/sdf.hpp"
#include "presta/timing_graph.hpp"

namespace presta {

enum class AtSource { Labels, External, Propagated };

struct PinTiming {
    std::vector<FourCorner> at;    // per node id
    std::vector<FourCorner> slew;  // per node id
    AtSource source = AtSource::Propagated;
    std::vector<std::string> warnings;
};

struct PropagateOptions {
    double default_pi_slew = 0.05;     // ns
    double net_delay_per_micron = 0.0; // linear pre-routing net delay model, default off
    bool clock_early_min_rf = false;   // downstream: min(ER,EF) instead of ER
};

// Copy AT/Slew labels onto graph nodes. Strict mode fails when any graph
// pin is missing from the labels; permissive mode fills gaps by a local
// propagation fallback (zero AT, default slew).
inline PinTiming at_from_labels(const TimingGraph& graph, const DelayLabels& labels,
                                bool strict = true, double default_slew = 0.05) {
    PinTiming t;
    t.source = AtSource::Labels;
    t.at.assign(graph.nodes.size(), {});
    t.slew.assign(graph.nodes.size(), {});
    std::vector<std::string> missing;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        auto it = labels.pin_at.find(graph.nodes[i].name);
        if (it == labels.pin_at.end()) {
            missing.push_back(graph.nodes[i].name);
            t.slew[i] = {default_slew, default_slew, default_slew, default_slew};
            continue;
        }
        t.at[i] = it->second;
        auto sl = labels.pin_slew.find(graph.nodes[i].name);
        t.slew[i] = sl != labels.pin_slew.end()
                        ? sl->second
                        : FourCorner{default_slew, default_slew, default_slew, default_slew};
    }
    if (!missing.empty()) {
        if (strict) {
            std::string msg = "labels missing for " + std::to_string(missing.size()) +
                              " pin(s):";
            size_t show = std::min<size_t>(missing.size(), 20);
            for (size_t i = 0; i < show; ++i) msg += " " + missing[i];
            if (missing.size() > show) msg += " ...";
            throw ArgError(msg);
        }
        t.warnings.push_back("labels missing for " + std::to_string(missing.size()) +
                             " pin(s); filled with AT 0");
    }
    size_t extra = 0;
    for (const auto& [pin, v] : labels.pin_at) {
        static_cast<void>(v);
        if (graph.find_node(pin) < 0) ++extra;
    }
    if (extra > 0)
        t.warnings.push_back(std::to_string(extra) + " label pin(s) not present in graph");
    return t;
}

// Prediction sidecar ingestion shares the label record format.
inline PinTiming at_from_external(const TimingGraph& graph, std::string_view document,
                                  bool strict = true, double default_slew = 0.05) {
    DelayLabels labels = parse_label_sidecar(document);
    PinTiming t = at_from_labels(graph, labels, strict, default_slew);
    t.source = AtSource::External;
    return t;
}

namespace at_detail {

// delay table slot for a corner: rise corners use cell_rise, fall corners
// cell_fall; late corners use the late-library tables
inline int delay_slot(int corner) {
    return table_slot(corner_is_rise(corner) ? CellRise : CellFall, !corner_is_early(corner));
}
inline int transition_slot(int corner) {
    return table_slot(corner_is_rise(corner) ? RiseTransition : FallTransition,
                      !corner_is_early(corner));
}

// sum of sink-pin capacitances of the net driven by `node`, per corner
inline FourCorner output_load(const TimingGraph& g, int node) {
    FourCorner load;
    for (const auto& a : g.fwd[static_cast<size_t>(node)]) {
        if (a.is_cell) continue;
        const auto& cap = g.nodes[static_cast<size_t>(a.other)].capacitance;
        for (int c = 0; c < 4; ++c) load[c] += cap[c];
    }
    return load;
}

}  // namespace at_detail

// Built-in pre-routing NLDM forward propagator: level-order sweep, net
// edges pass AT/slew through (plus the optional linear net delay), cell
// edges look up delay and output transition per corner. Late corners merge
// with max, early corners with min. Transitions propagate same-sense.
inline PinTiming propagate_at(const TimingGraph& graph, const SdcConstraints& sdc,
                              const PropagateOptions& opt = {}) {
    if (graph.levels.size() != graph.nodes.size())
        throw InternalError("propagate_at: graph has no levels (compute_levels not applied)");
    PinTiming t;
    t.source = AtSource::Propagated;
    size_t n = graph.nodes.size();
    t.at.assign(n, {});
    t.slew.assign(n, {});
    FourCorner default_slew{opt.default_pi_slew, opt.default_pi_slew, opt.default_pi_slew,
                            opt.default_pi_slew};

    for (const auto& bucket : graph.level_buckets) {
        for (int node : bucket) {
            size_t u = static_cast<size_t>(node);
            const PinNode& pn = graph.nodes[u];
            if (graph.bwd[u].empty()) {
                // source node: PI data pin, clock source, or floating pin
                t.slew[u] = default_slew;
                if (pn.is_port) {
                    double d = (pn.name == sdc.clock_port) ? 0.0
                                                           : sdc.input_delay(pn.name);
                    t.at[u] = {d, d, d, d};
                }
                continue;
            }
            FourCorner at{}, slew = default_slew;
            bool first[4] = {true, true, true, true};
            for (const auto& e : graph.bwd[u]) {
                size_t p = static_cast<size_t>(e.other);
                if (!e.is_cell) {
                    double nd = opt.net_delay_per_micron *
                                graph.net_edges[static_cast<size_t>(e.edge)].length;
                    for (int c = 0; c < 4; ++c) {
                        double cand = t.at[p][c] + nd;
                        if (first[c] || (corner_is_early(c) ? cand < at[c] : cand > at[c])) {
                            at[c] = cand;
                            slew[c] = t.slew[p][c];
                            first[c] = false;
                        }
                    }
                } else {
                    const GraphArc& arc =
                        graph.arcs[static_cast<size_t>(graph.cell_edges[static_cast<size_t>(e.edge)].arc)];
                    FourCorner load = at_detail::output_load(graph, node);
                    for (int c = 0; c < 4; ++c) {
                        int ds = at_detail::delay_slot(c);
                        if (!arc.valid[static_cast<size_t>(ds)]) continue;  // skip arc, corner
                        double delay = lut_lookup(arc.tables[static_cast<size_t>(ds)],
                                                  t.slew[p][c], load[c]);
                        double cand = t.at[p][c] + delay;
                        if (first[c] || (corner_is_early(c) ? cand < at[c] : cand > at[c])) {
                            at[c] = cand;
                            int ts = at_detail::transition_slot(c);
                            slew[c] = arc.valid[static_cast<size_t>(ts)]
                                          ? lut_lookup(arc.tables[static_cast<size_t>(ts)],
                                                       t.slew[p][c], load[c])
                                          : t.slew[p][c];
                            first[c] = false;
                        }
                    }
                }
            }
            t.at[u] = at;
            t.slew[u] = slew;
        }
    }
    return t;
}

// late-rise arc delay as seen by the propagator; used for backward
// critical-path walks regardless of the AT source
inline double arc_delay_late_rise(const TimingGraph& g, const PinTiming& t, const AdjEntry& e,
                                  const PropagateOptions& opt = {}) {
    if (!e.is_cell)
        return opt.net_delay_per_micron * g.net_edges[static_cast<size_t>(e.edge)].length;
    const CellEdge& ce = g.cell_edges[static_cast<size_t>(e.edge)];
    const GraphArc& arc = g.arcs[static_cast<size_t>(ce.arc)];
    int ds = at_detail::delay_slot(LR);
    if (!arc.valid[static_cast<size_t>(ds)]) return 0.0;
    FourCorner load = at_detail::output_load(g, ce.dst);
    return lut_lookup(arc.tables[static_cast<size_t>(ds)], t.slew[static_cast<size_t>(ce.src)][LR],
                      load[LR]);
}

}  // namespace presta
