#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "presta/common.hpp"
#include "presta/liberty.hpp"
#include "presta/physical.hpp"
#include "presta/sdf.hpp"

namespace presta {

struct PinNode {
    std::string name;  // "inst/pin" or port name
    bool is_port = false;
    bool is_primary_io = false;
    int component = -1;  // index into PhysicalDesign::components, -1 for ports
    std::string pin;     // pin name within the cell (port name for ports)
    bool is_fanout = false;  // drives a net: output pins and input ports
    bool is_clock_pin = false;
    FourCorner capacitance;
    Point location;  // dbu
    std::array<double, 4> boundary_distances{};  // micron: left, bottom, right, top
};

struct NetEdge {
    int src = -1;  // driver node
    int dst = -1;  // sink node
    double length = 0.0;  // micron, Manhattan
    int net = -1;         // index into PhysicalDesign::nets
};

// One merged timing arc with its LUTs interpolated to the target shape;
// shared between all instances of the same cell class.
struct GraphArc {
    std::string cell_class;
    std::string related_input_pin;
    std::string output_pin;
    std::array<Lut, 8> tables;
    std::array<bool, 8> valid{};
};

struct CellEdge {
    int src = -1;
    int dst = -1;
    int arc = -1;  // index into TimingGraph::arcs
};

struct RemovedEdge {
    bool is_cell = false;
    int index = -1;
    bool operator==(const RemovedEdge&) const = default;
};

// Forward adjacency entry (cell edge, or net edge in driver->sink direction).
struct AdjEntry {
    bool is_cell = false;
    int edge = -1;
    int other = -1;
};

struct TimingGraph {
    std::vector<PinNode> nodes;
    std::vector<NetEdge> net_edges;
    std::vector<CellEdge> cell_edges;
    std::vector<GraphArc> arcs;
    std::vector<char> net_edge_removed;
    std::vector<char> cell_edge_removed;
    std::vector<RemovedEdge> removed_edges;
    std::vector<int> endpoints;            // zero forward out-degree, ascending
    std::vector<int> levels;               // per node, after compute_levels
    std::vector<std::vector<int>> level_buckets;
    int64_t dbu_per_micron = 1000;
    std::array<Point, 4> die{};

    std::vector<std::vector<AdjEntry>> fwd;
    std::vector<std::vector<AdjEntry>> bwd;

    std::map<std::string, int> node_index;

    int find_node(const std::string& name) const {
        auto it = node_index.find(name);
        return it == node_index.end() ? -1 : it->second;
    }

    void rebuild_adjacency() {
        size_t n = nodes.size();
        fwd.assign(n, {});
        bwd.assign(n, {});
        for (size_t i = 0; i < net_edges.size(); ++i) {
            if (net_edge_removed[i]) continue;
            const auto& e = net_edges[i];
            fwd[static_cast<size_t>(e.src)].push_back({false, static_cast<int>(i), e.dst});
            bwd[static_cast<size_t>(e.dst)].push_back({false, static_cast<int>(i), e.src});
        }
        for (size_t i = 0; i < cell_edges.size(); ++i) {
            if (cell_edge_removed[i]) continue;
            const auto& e = cell_edges[i];
            fwd[static_cast<size_t>(e.src)].push_back({true, static_cast<int>(i), e.dst});
            bwd[static_cast<size_t>(e.dst)].push_back({true, static_cast<int>(i), e.src});
        }
        // deterministic traversal order
        for (auto& v : fwd)
            std::sort(v.begin(), v.end(), [](const AdjEntry& a, const AdjEntry& b) {
                return std::tie(a.other, a.is_cell, a.edge) <
                       std::tie(b.other, b.is_cell, b.edge);
            });
        for (auto& v : bwd)
            std::sort(v.begin(), v.end(), [](const AdjEntry& a, const AdjEntry& b) {
                return std::tie(a.other, a.is_cell, a.edge) <
                       std::tie(b.other, b.is_cell, b.edge);
            });
    }

    void recompute_endpoints() {
        endpoints.clear();
        for (size_t i = 0; i < nodes.size(); ++i)
            if (fwd[i].empty()) endpoints.push_back(static_cast<int>(i));
    }
};

inline TimingGraph build_graph(const PhysicalDesign& design, const LibrarySet& libs,
                               size_t lut_rows = 7, size_t lut_cols = 7) {
    TimingGraph g;
    g.dbu_per_micron = design.dbu_per_micron;
    g.die = design.die;
    double dbu = static_cast<double>(design.dbu_per_micron);
    double die_w = static_cast<double>(design.die_width());
    double die_h = static_cast<double>(design.die_height());

    auto boundary = [&](const Point& p) {
        std::array<double, 4> b;
        b[0] = (static_cast<double>(p.x) - static_cast<double>(g.die[0].x)) / dbu;  // left
        b[1] = (static_cast<double>(p.y) - static_cast<double>(g.die[0].y)) / dbu;  // bottom
        b[2] = (die_w - (static_cast<double>(p.x) - static_cast<double>(g.die[0].x))) / dbu;
        b[3] = (die_h - (static_cast<double>(p.y) - static_cast<double>(g.die[0].y))) / dbu;
        return b;
    };

    // resolve every cell class up front
    std::map<std::string, LibertyCell> classes;
    std::vector<std::string> unresolved;
    for (const auto& comp : design.components) {
        if (classes.count(comp.cell_class)) continue;
        auto merged = merged_cell(libs, comp.cell_class);
        if (!merged) {
            if (std::find(unresolved.begin(), unresolved.end(), comp.cell_class) ==
                unresolved.end())
                unresolved.push_back(comp.cell_class);
            continue;
        }
        classes.emplace(comp.cell_class, std::move(*merged));
    }
    if (!unresolved.empty()) {
        std::string msg = "unresolved cell classes:";
        for (const auto& c : unresolved) msg += " " + c;
        throw ParseError(msg);
    }

    // shared interpolated arcs per cell class
    std::map<std::string, std::vector<int>> class_arcs;
    for (const auto& [cls, cell] : classes) {
        auto& idxs = class_arcs[cls];
        for (const auto& arc : cell.arcs) {
            GraphArc ga;
            ga.cell_class = cls;
            ga.related_input_pin = arc.related_input_pin;
            ga.output_pin = arc.output_pin;
            ga.valid = arc.valid;
            for (int s = 0; s < 8; ++s)
                if (arc.valid[s]) ga.tables[s] = interpolate_lut(arc.tables[s], lut_rows, lut_cols);
            idxs.push_back(static_cast<int>(g.arcs.size()));
            g.arcs.push_back(std::move(ga));
        }
    }

    auto add_node = [&](PinNode node) {
        int id = static_cast<int>(g.nodes.size());
        g.node_index[node.name] = id;
        g.nodes.push_back(std::move(node));
        return id;
    };

    for (const auto& port : design.ports) {
        PinNode n;
        n.name = port.name;
        n.pin = port.name;
        n.is_port = true;
        n.is_primary_io = true;
        n.location = port.location;
        n.is_fanout = (port.direction != PortDef::Output);
        n.boundary_distances = boundary(port.location);
        add_node(std::move(n));
    }

    for (size_t ci = 0; ci < design.components.size(); ++ci) {
        const auto& comp = design.components[ci];
        const auto& cell = classes.at(comp.cell_class);
        for (const auto& [pname, pin] : cell.pins) {
            PinNode n;
            n.name = comp.instance + "/" + pname;
            n.pin = pname;
            n.component = static_cast<int>(ci);
            // all pins of an instance share the component origin (no LEF)
            n.location = comp.location;
            n.is_fanout = (pin.direction == LibertyPin::Output);
            n.is_clock_pin = pin.is_clock;
            n.capacitance = pin.capacitance;
            n.boundary_distances = boundary(comp.location);
            add_node(std::move(n));
        }
    }

    // net edges: one per (driver, sink)
    for (size_t ni = 0; ni < design.nets.size(); ++ni) {
        const auto& net = design.nets[ni];
        if (net.driver < 0) continue;
        auto node_of = [&](const NetConnection& c) {
            std::string nm = c.is_port ? c.pin : c.instance + "/" + c.pin;
            int id = g.find_node(nm);
            if (id < 0)
                throw ParseError("net " + net.name + " references unknown pin " + nm);
            return id;
        };
        int drv = node_of(net.connections[static_cast<size_t>(net.driver)]);
        for (size_t k = 0; k < net.connections.size(); ++k) {
            if (static_cast<int>(k) == net.driver) continue;
            int snk = node_of(net.connections[k]);
            NetEdge e;
            e.src = drv;
            e.dst = snk;
            e.net = static_cast<int>(ni);
            const Point& a = g.nodes[static_cast<size_t>(drv)].location;
            const Point& b = g.nodes[static_cast<size_t>(snk)].location;
            e.length = (std::abs(static_cast<double>(a.x - b.x)) +
                        std::abs(static_cast<double>(a.y - b.y))) /
                       dbu;
            g.net_edges.push_back(e);
        }
    }

    // cell edges: one per liberty arc of each instance
    for (size_t ci = 0; ci < design.components.size(); ++ci) {
        const auto& comp = design.components[ci];
        for (int ai : class_arcs.at(comp.cell_class)) {
            const auto& arc = g.arcs[static_cast<size_t>(ai)];
            int src = g.find_node(comp.instance + "/" + arc.related_input_pin);
            int dst = g.find_node(comp.instance + "/" + arc.output_pin);
            if (src < 0 || dst < 0) continue;
            g.cell_edges.push_back({src, dst, ai});
        }
    }

    g.net_edge_removed.assign(g.net_edges.size(), 0);
    g.cell_edge_removed.assign(g.cell_edges.size(), 0);
    g.rebuild_adjacency();
    g.recompute_endpoints();
    return g;
}

namespace graph_detail {

// one DFS pass removing back edges; returns true if a restart is needed
// (a tree edge on the active path was cut instead of the back edge)
inline bool cycle_removal_pass(TimingGraph& g, bool& removed_any) {
    size_t n = g.nodes.size();
    std::vector<char> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<int> indeg(n, 0);
    for (size_t u = 0; u < n; ++u)
        for (const auto& a : g.fwd[u]) ++indeg[static_cast<size_t>(a.other)];

    std::vector<int> roots;
    for (size_t u = 0; u < n; ++u)
        if (indeg[u] == 0) roots.push_back(static_cast<int>(u));

    struct Frame {
        int node;
        size_t next = 0;
        AdjEntry via{};  // edge used to enter this node (undefined for roots)
        bool has_via = false;
    };
    std::vector<Frame> stack;

    auto remove_edge = [&](const AdjEntry& e) {
        if (e.is_cell)
            g.cell_edge_removed[static_cast<size_t>(e.edge)] = 1;
        else
            g.net_edge_removed[static_cast<size_t>(e.edge)] = 1;
        g.removed_edges.push_back({e.is_cell, e.edge});
        removed_any = true;
    };

    auto run_from = [&](int root) -> bool {
        stack.clear();
        stack.push_back({root});
        state[static_cast<size_t>(root)] = 1;
        while (!stack.empty()) {
            Frame& f = stack.back();
            auto& adj = g.fwd[static_cast<size_t>(f.node)];
            bool descended = false;
            while (f.next < adj.size()) {
                AdjEntry e = adj[f.next++];
                bool alive = e.is_cell ? !g.cell_edge_removed[static_cast<size_t>(e.edge)]
                                       : !g.net_edge_removed[static_cast<size_t>(e.edge)];
                if (!alive) continue;
                char st = state[static_cast<size_t>(e.other)];
                if (st == 1) {
                    // back edge: prefer cutting a cell edge when the back
                    // edge is a net edge whose removal would orphan its sink
                    bool cut_back_edge = true;
                    if (!e.is_cell) {
                        int live_in = 0;
                        for (const auto& b : g.bwd[static_cast<size_t>(e.other)]) {
                            bool ba = b.is_cell
                                          ? !g.cell_edge_removed[static_cast<size_t>(b.edge)]
                                          : !g.net_edge_removed[static_cast<size_t>(b.edge)];
                            if (ba) ++live_in;
                        }
                        if (live_in <= 1) {
                            // find a cell edge on the active path segment
                            // from e.other up to the current node
                            size_t seg_start = 0;
                            for (size_t s = 0; s < stack.size(); ++s)
                                if (stack[s].node == e.other) {
                                    seg_start = s;
                                    break;
                                }
                            for (size_t s = seg_start + 1; s < stack.size(); ++s) {
                                if (stack[s].has_via && stack[s].via.is_cell) {
                                    remove_edge(stack[s].via);
                                    return true;  // restart: path edge cut
                                }
                            }
                        }
                    }
                    if (cut_back_edge) remove_edge(e);
                } else if (st == 0) {
                    state[static_cast<size_t>(e.other)] = 1;
                    stack.push_back({e.other, 0, e, true});
                    descended = true;
                    break;
                }
            }
            if (!descended && (stack.back().next >= g.fwd[static_cast<size_t>(stack.back().node)].size())) {
                state[static_cast<size_t>(stack.back().node)] = 2;
                stack.pop_back();
            }
        }
        return false;
    };

    for (int r : roots)
        if (state[static_cast<size_t>(r)] == 0)
            if (run_from(r)) return true;
    for (size_t u = 0; u < n; ++u)
        if (state[u] == 0)
            if (run_from(static_cast<int>(u))) return true;
    return false;
}

inline bool is_acyclic(const TimingGraph& g, std::vector<int>* levels_out = nullptr) {
    size_t n = g.nodes.size();
    std::vector<int> indeg(n, 0);
    for (size_t u = 0; u < n; ++u)
        for (const auto& a : g.fwd[u]) ++indeg[static_cast<size_t>(a.other)];
    std::vector<int> levels(n, 0);
    std::vector<int> queue;
    for (size_t u = 0; u < n; ++u)
        if (indeg[u] == 0) queue.push_back(static_cast<int>(u));
    size_t head = 0, seen = 0;
    while (head < queue.size()) {
        int u = queue[head++];
        ++seen;
        for (const auto& a : g.fwd[static_cast<size_t>(u)]) {
            size_t v = static_cast<size_t>(a.other);
            levels[v] = std::max(levels[v], levels[static_cast<size_t>(u)] + 1);
            if (--indeg[v] == 0) queue.push_back(a.other);
        }
    }
    if (seen != n) return false;
    if (levels_out) *levels_out = std::move(levels);
    return true;
}

}  // namespace graph_detail

// Cut back edges found by DFS from all zero-in-degree nodes (deterministic,
// nodes by ascending id) until the forward graph is acyclic.
inline void remove_cycles(TimingGraph& g) {
    for (;;) {
        bool removed_any = false;
        bool restart = graph_detail::cycle_removal_pass(g, removed_any);
        g.rebuild_adjacency();
        if (restart) continue;
        if (graph_detail::is_acyclic(g)) break;
        if (!removed_any)
            throw InternalError("remove_cycles: no progress on cyclic graph");
    }
    g.recompute_endpoints();
}

inline void compute_levels(TimingGraph& g) {
    std::vector<int> levels;
    if (!graph_detail::is_acyclic(g, &levels))
        throw InternalError("compute_levels: graph has a cycle (remove_cycles not applied?)");
    g.levels = std::move(levels);
    int max_level = 0;
    for (int l : g.levels) max_level = std::max(max_level, l);
    g.level_buckets.assign(static_cast<size_t>(max_level) + 1, {});
    for (size_t i = 0; i < g.levels.size(); ++i)
        g.level_buckets[static_cast<size_t>(g.levels[i])].push_back(static_cast<int>(i));
}

// ---- graph interchange document -------------------------------------------

inline constexpr const char* kGraphSchema = "presta-graph";
inline constexpr int kGraphSchemaVersion = 1;

inline nlohmann::json export_graph(const TimingGraph& g, const DelayLabels* labels = nullptr,
                                   std::vector<std::string>* label_warnings = nullptr) {
    nlohmann::json j;
    j["schema"] = kGraphSchema;
    j["version"] = kGraphSchemaVersion;
    j["dbu_per_micron"] = g.dbu_per_micron;
    j["die"] = {g.die[0].x, g.die[0].y, g.die[2].x, g.die[2].y};
    j["node_feature_columns"] = {"is_primary_io",  "dist_left",  "dist_bottom",
                                 "dist_right",     "dist_top",   "cap_er",
                                 "cap_ef",         "cap_lr",     "cap_lf",
                                 "direction_fanout"};

    auto& names = j["node_names"] = nlohmann::json::array();
    auto& feats = j["node_features"] = nlohmann::json::array();
    auto& clk = j["node_is_clock_pin"] = nlohmann::json::array();
    auto& loc = j["node_locations"] = nlohmann::json::array();
    auto& comps = j["node_components"] = nlohmann::json::array();
    for (const auto& n : g.nodes) {
        names.push_back(n.name);
        comps.push_back(n.component);
        feats.push_back({n.is_primary_io ? 1.0 : 0.0, n.boundary_distances[0],
                         n.boundary_distances[1], n.boundary_distances[2],
                         n.boundary_distances[3], n.capacitance[ER], n.capacitance[EF],
                         n.capacitance[LR], n.capacitance[LF], n.is_fanout ? 1.0 : 0.0});
        clk.push_back(n.is_clock_pin);
        loc.push_back({n.location.x, n.location.y});
    }

    auto& nets = j["net_edges"] = nlohmann::json::array();
    for (size_t i = 0; i < g.net_edges.size(); ++i) {
        if (g.net_edge_removed[i]) continue;
        const auto& e = g.net_edges[i];
        nets.push_back({e.src, e.dst, e.length});
    }

    auto& arcs = j["arcs"] = nlohmann::json::array();
    for (const auto& a : g.arcs) {
        nlohmann::json ja;
        ja["cell_class"] = a.cell_class;
        ja["input"] = a.related_input_pin;
        ja["output"] = a.output_pin;
        ja["valid"] = a.valid;
        auto& tables = ja["tables"] = nlohmann::json::array();
        for (int s = 0; s < 8; ++s) {
            nlohmann::json t;
            if (a.valid[static_cast<size_t>(s)]) {
                t["index1"] = a.tables[static_cast<size_t>(s)].index1;
                t["index2"] = a.tables[static_cast<size_t>(s)].index2;
                t["values"] = a.tables[static_cast<size_t>(s)].values;
            }
            tables.push_back(std::move(t));
        }
        arcs.push_back(std::move(ja));
    }

    auto& cells = j["cell_edges"] = nlohmann::json::array();
    for (size_t i = 0; i < g.cell_edges.size(); ++i) {
        if (g.cell_edge_removed[i]) continue;
        const auto& e = g.cell_edges[i];
        cells.push_back({e.src, e.dst, e.arc});
    }

    j["endpoints"] = g.endpoints;
    j["levels"] = g.levels;
    auto& rem = j["removed_edges"] = nlohmann::json::array();
    for (const auto& r : g.removed_edges) rem.push_back({r.is_cell, r.index});

    if (labels) {
        auto put_pin_labels = [&](const char* key,
                                  const std::map<std::string, FourCorner>& m) {
            if (m.empty()) return;
            auto& arr = j["labels"][key] = nlohmann::json::array();
            for (const auto& n : g.nodes) {
                auto it = m.find(n.name);
                if (it == m.end())
                    arr.push_back(nullptr);
                else
                    arr.push_back(it->second.v);
            }
            for (const auto& [pin, v] : m) {
                static_cast<void>(v);
                if (g.find_node(pin) < 0 && label_warnings)
                    label_warnings->push_back(std::string("label pin not in graph: ") + pin);
            }
        };
        put_pin_labels("at", labels->pin_at);
        put_pin_labels("rat", labels->pin_rat);
        put_pin_labels("slew", labels->pin_slew);
    }
    return j;
}

// Re-import of an interchange document: structure only (features, edges,
// arcs); labels are carried by DelayLabels separately.
inline TimingGraph import_graph(const nlohmann::json& j) {
    if (j.value("schema", "") != kGraphSchema)
        throw ParseError("graph document: wrong or missing schema id");
    if (j.value("version", 0) != kGraphSchemaVersion)
        throw ParseError("graph document: unsupported schema version");
    TimingGraph g;
    g.dbu_per_micron = j["dbu_per_micron"].get<int64_t>();
    auto die = j["die"];
    g.die = {Point{die[0], die[1]}, Point{die[2], die[1]}, Point{die[2], die[3]},
             Point{die[0], die[3]}};
    const auto& names = j["node_names"];
    const auto& feats = j["node_features"];
    const auto& clk = j["node_is_clock_pin"];
    const auto& loc = j["node_locations"];
    for (size_t i = 0; i < names.size(); ++i) {
        PinNode n;
        n.name = names[i].get<std::string>();
        const auto& f = feats[i];
        n.is_primary_io = f[0].get<double>() != 0.0;
        n.is_port = n.is_primary_io;
        for (int k = 0; k < 4; ++k)
            n.boundary_distances[static_cast<size_t>(k)] = f[1 + k].get<double>();
        for (int c = 0; c < 4; ++c) n.capacitance[c] = f[5 + c].get<double>();
        n.is_fanout = f[9].get<double>() != 0.0;
        n.is_clock_pin = clk[i].get<bool>();
        if (j.contains("node_components")) n.component = j["node_components"][i].get<int>();
        n.location = {loc[i][0].get<int64_t>(), loc[i][1].get<int64_t>()};
        g.node_index[n.name] = static_cast<int>(i);
        g.nodes.push_back(std::move(n));
    }
    for (const auto& e : j["net_edges"]) {
        NetEdge ne;
        ne.src = e[0].get<int>();
        ne.dst = e[1].get<int>();
        ne.length = e[2].get<double>();
        g.net_edges.push_back(ne);
    }
    for (const auto& ja : j["arcs"]) {
        GraphArc a;
        a.cell_class = ja["cell_class"].get<std::string>();
        a.related_input_pin = ja["input"].get<std::string>();
        a.output_pin = ja["output"].get<std::string>();
        for (int s = 0; s < 8; ++s) {
            a.valid[static_cast<size_t>(s)] = ja["valid"][static_cast<size_t>(s)].get<bool>();
            if (a.valid[static_cast<size_t>(s)]) {
                const auto& t = ja["tables"][static_cast<size_t>(s)];
                a.tables[static_cast<size_t>(s)].index1 =
                    t["index1"].get<std::vector<double>>();
                a.tables[static_cast<size_t>(s)].index2 =
                    t["index2"].get<std::vector<double>>();
                a.tables[static_cast<size_t>(s)].values =
                    t["values"].get<std::vector<double>>();
            }
        }
        g.arcs.push_back(std::move(a));
    }
    for (const auto& e : j["cell_edges"])
        g.cell_edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    g.net_edge_removed.assign(g.net_edges.size(), 0);
    g.cell_edge_removed.assign(g.cell_edges.size(), 0);
    g.rebuild_adjacency();
    g.recompute_endpoints();
    if (j.contains("levels") && !j["levels"].empty())
        g.levels = j["levels"].get<std::vector<int>>();
    return g;
}

}  // namespace presta
