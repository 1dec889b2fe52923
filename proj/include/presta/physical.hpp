#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "presta/common.hpp"
#include "presta/liberty.hpp"

namespace presta {

struct PortDef {
    std::string name;
    enum Dir { Input, Output, Inout } direction = Input;
    Point location;
    bool placed = false;
};

struct ComponentDef {
    std::string instance;
    std::string cell_class;
    Point location;
    std::string orientation = "N";
    bool placed = false;
};

struct NetConnection {
    bool is_port = false;
    std::string instance;  // empty for ports
    std::string pin;       // pin name, or port name when is_port
};

struct NetDef {
    std::string name;
    std::vector<NetConnection> connections;
    int driver = -1;  // index into connections after resolve_net_drivers
};

struct PhysicalDesign {
    std::string design_name;
    std::array<Point, 4> die{};  // (xlo,ylo) (xhi,ylo) (xhi,yhi) (xlo,yhi)
    int64_t dbu_per_micron = 1000;
    std::vector<PortDef> ports;
    std::vector<ComponentDef> components;
    std::vector<NetDef> nets;
    std::vector<std::string> warnings;
    std::vector<std::string> net_diagnostics;  // from resolve_net_drivers

    int64_t die_width() const { return die[1].x - die[0].x; }
    int64_t die_height() const { return die[3].y - die[0].y; }
};

namespace def_detail {

struct Lexer {
    std::istringstream in;
    int line = 1;
    explicit Lexer(std::string_view src) : in(std::string(src)) {}

    std::optional<std::string> next() {
        std::string tok;
        char c;
        while (in.get(c)) {
            if (c == '\n') {
                ++line;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            if (c == '#') {  // comment to end of line
                std::string junk;
                std::getline(in, junk);
                ++line;
                continue;
            }
            tok.push_back(c);
            while (in.get(c)) {
                if (std::isspace(static_cast<unsigned char>(c))) {
                    if (c == '\n') ++line;
                    break;
                }
                tok.push_back(c);
            }
            return tok;
        }
        return std::nullopt;
    }
};

inline int64_t to_int(const std::string& s, int line) {
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        throw ParseError("def: expected integer, got '" + s + "'", line);
    }
}

}  // namespace def_detail

inline PhysicalDesign parse_def(std::string_view text) {
    def_detail::Lexer lx(text);
    PhysicalDesign d;
    bool saw_diearea = false, saw_nets = false;

    auto expect = [&](const std::string& want) {
        auto t = lx.next();
        if (!t || *t != want)
            throw ParseError("def: expected '" + want + "'", lx.line);
    };

    std::optional<std::string> tok;
    while ((tok = lx.next())) {
        const std::string& t = *tok;
        if (t == "DESIGN") {
            auto n = lx.next();
            if (n && *n != ";") {
                d.design_name = *n;
                expect(";");
            }
        } else if (t == "UNITS") {
            expect("DISTANCE");
            expect("MICRONS");
            auto v = lx.next();
            if (!v) throw ParseError("def: truncated UNITS", lx.line);
            d.dbu_per_micron = def_detail::to_int(*v, lx.line);
            expect(";");
        } else if (t == "DIEAREA") {
            std::vector<Point> pts;
            while (true) {
                auto p = lx.next();
                if (!p) throw ParseError("def: truncated DIEAREA", lx.line);
                if (*p == ";") break;
                if (*p != "(") throw ParseError("def: expected '(' in DIEAREA", lx.line);
                auto xs = lx.next(), ys = lx.next();
                if (!xs || !ys) throw ParseError("def: truncated DIEAREA point", lx.line);
                pts.push_back({def_detail::to_int(*xs, lx.line),
                               def_detail::to_int(*ys, lx.line)});
                expect(")");
            }
            if (pts.size() < 2) throw ParseError("def: DIEAREA needs >= 2 points", lx.line);
            // bounding box; rectilinear outlines reduce to it
            int64_t xlo = pts[0].x, xhi = pts[0].x, ylo = pts[0].y, yhi = pts[0].y;
            for (auto& p : pts) {
                xlo = std::min(xlo, p.x);
                xhi = std::max(xhi, p.x);
                ylo = std::min(ylo, p.y);
                yhi = std::max(yhi, p.y);
            }
            d.die = {Point{xlo, ylo}, Point{xhi, ylo}, Point{xhi, yhi}, Point{xlo, yhi}};
            saw_diearea = true;
        } else if (t == "PINS") {
            lx.next();  // count
            expect(";");
            while (true) {
                auto p = lx.next();
                if (!p) throw ParseError("def: truncated PINS", lx.line);
                if (*p == "END") {
                    lx.next();  // PINS
                    break;
                }
                if (*p != "-") continue;
                PortDef port;
                auto nm = lx.next();
                if (!nm) throw ParseError("def: truncated pin", lx.line);
                port.name = *nm;
                while (true) {
                    auto q = lx.next();
                    if (!q) throw ParseError("def: truncated pin " + port.name, lx.line);
                    if (*q == ";") break;
                    if (*q == "DIRECTION") {
                        auto dir = lx.next();
                        if (!dir) throw ParseError("def: truncated DIRECTION", lx.line);
                        if (*dir == "INPUT")
                            port.direction = PortDef::Input;
                        else if (*dir == "OUTPUT")
                            port.direction = PortDef::Output;
                        else
                            port.direction = PortDef::Inout;
                    } else if (*q == "PLACED" || *q == "FIXED") {
                        expect("(");
                        auto xs = lx.next(), ys = lx.next();
                        if (!xs || !ys) throw ParseError("def: truncated placement", lx.line);
                        port.location = {def_detail::to_int(*xs, lx.line),
                                         def_detail::to_int(*ys, lx.line)};
                        port.placed = true;
                        expect(")");
                    }
                }
                d.ports.push_back(std::move(port));
            }
        } else if (t == "COMPONENTS") {
            lx.next();  // count
            expect(";");
            while (true) {
                auto p = lx.next();
                if (!p) throw ParseError("def: truncated COMPONENTS", lx.line);
                if (*p == "END") {
                    lx.next();
                    break;
                }
                if (*p != "-") continue;
                ComponentDef comp;
                auto inst = lx.next(), cls = lx.next();
                if (!inst || !cls) throw ParseError("def: truncated component", lx.line);
                comp.instance = *inst;
                comp.cell_class = *cls;
                while (true) {
                    auto q = lx.next();
                    if (!q) throw ParseError("def: truncated component " + comp.instance,
                                             lx.line);
                    if (*q == ";") break;
                    if (*q == "PLACED" || *q == "FIXED") {
                        expect("(");
                        auto xs = lx.next(), ys = lx.next();
                        if (!xs || !ys) throw ParseError("def: truncated placement", lx.line);
                        comp.location = {def_detail::to_int(*xs, lx.line),
                                         def_detail::to_int(*ys, lx.line)};
                        expect(")");
                        auto orient = lx.next();
                        if (orient && *orient != ";") {
                            comp.orientation = *orient;
                        } else if (orient && *orient == ";") {
                            comp.placed = true;
                            break;
                        }
                        comp.placed = true;
                    }
                }
                if (!comp.placed)
                    d.warnings.push_back("component " + comp.instance +
                                         " has no placement; using (0,0)");
                d.components.push_back(std::move(comp));
            }
        } else if (t == "NETS") {
            lx.next();  // count
            expect(";");
            saw_nets = true;
            while (true) {
                auto p = lx.next();
                if (!p) throw ParseError("def: truncated NETS", lx.line);
                if (*p == "END") {
                    lx.next();
                    break;
                }
                if (*p != "-") continue;
                NetDef net;
                auto nm = lx.next();
                if (!nm) throw ParseError("def: truncated net", lx.line);
                net.name = *nm;
                while (true) {
                    auto q = lx.next();
                    if (!q) throw ParseError("def: truncated net " + net.name, lx.line);
                    if (*q == ";") break;
                    if (*q == "(") {
                        auto a = lx.next(), b = lx.next();
                        if (!a || !b) throw ParseError("def: truncated net pin", lx.line);
                        NetConnection conn;
                        if (*a == "PIN") {
                            conn.is_port = true;
                            conn.pin = *b;
                        } else {
                            conn.instance = *a;
                            conn.pin = *b;
                        }
                        net.connections.push_back(std::move(conn));
                        expect(")");
                    }
                }
                d.nets.push_back(std::move(net));
            }
        } else if (t == "END" ) {
            lx.next();  // section name or DESIGN
        }
        // all other sections (VIAS, SPECIALNETS, TRACKS, ROWS, ...) skipped
    }

    if (!saw_diearea) throw ParseError("def: missing DIEAREA section");
    if (!saw_nets) throw ParseError("def: missing NETS section");

    // validate net references
    std::map<std::string, size_t> comp_index;
    for (size_t i = 0; i < d.components.size(); ++i)
        comp_index[d.components[i].instance] = i;
    std::map<std::string, size_t> port_index;
    for (size_t i = 0; i < d.ports.size(); ++i) port_index[d.ports[i].name] = i;
    for (const auto& net : d.nets) {
        for (const auto& c : net.connections) {
            if (c.is_port) {
                if (!port_index.count(c.pin))
                    throw ParseError("def: net " + net.name + " references unknown port " +
                                     c.pin);
            } else if (!comp_index.count(c.instance)) {
                throw ParseError("def: net " + net.name +
                                 " references undeclared component " + c.instance);
            }
        }
    }
    return d;
}

// Annotate each net with its unique driver (output pin or input port).
// Nets with zero or multiple drivers are flagged and keep driver = -1.
inline PhysicalDesign resolve_net_drivers(PhysicalDesign design, const LibrarySet& libs) {
    std::map<std::string, const ComponentDef*> comps;
    for (const auto& c : design.components) comps[c.instance] = &c;
    std::map<std::string, const PortDef*> ports;
    for (const auto& p : design.ports) ports[p.name] = &p;

    std::map<std::string, LibertyCell> cell_cache;
    auto pin_dir = [&](const NetConnection& c) -> std::optional<LibertyPin::Dir> {
        auto ci = comps.find(c.instance);
        if (ci == comps.end()) return std::nullopt;
        const std::string& cls = ci->second->cell_class;
        auto cc = cell_cache.find(cls);
        if (cc == cell_cache.end()) {
            auto merged = merged_cell(libs, cls);
            if (!merged) return std::nullopt;
            cc = cell_cache.emplace(cls, std::move(*merged)).first;
        }
        auto pi = cc->second.pins.find(c.pin);
        if (pi == cc->second.pins.end()) return std::nullopt;
        return pi->second.direction;
    };

    for (auto& net : design.nets) {
        std::vector<int> output_drivers;   // component output pins
        std::vector<int> port_drivers;     // input ports
        std::vector<int> inout_candidates;
        for (size_t k = 0; k < net.connections.size(); ++k) {
            const auto& c = net.connections[k];
            if (c.is_port) {
                auto pi = ports.find(c.pin);
                if (pi == ports.end()) continue;
                if (pi->second->direction == PortDef::Input)
                    port_drivers.push_back(static_cast<int>(k));
                else if (pi->second->direction == PortDef::Inout)
                    inout_candidates.push_back(static_cast<int>(k));
            } else {
                auto dir = pin_dir(c);
                if (dir && *dir == LibertyPin::Output)
                    output_drivers.push_back(static_cast<int>(k));
                else if (dir && *dir == LibertyPin::Inout)
                    inout_candidates.push_back(static_cast<int>(k));
            }
        }
        int total = static_cast<int>(output_drivers.size() + port_drivers.size());
        if (total == 1) {
            net.driver = output_drivers.empty() ? port_drivers[0] : output_drivers[0];
        } else if (total == 0 && inout_candidates.size() == 1) {
            net.driver = inout_candidates[0];
        } else if (total == 0) {
            net.driver = -1;
            design.net_diagnostics.push_back("net " + net.name + ": undriven");
        } else {
            net.driver = -1;
            design.net_diagnostics.push_back("net " + net.name + ": multi-driver");
        }
    }
    return design;
}

// Re-serialize the supported DEF subset (round-trip checks, generator).
inline std::string emit_def(const PhysicalDesign& d) {
    std::ostringstream os;
    os << "VERSION 5.8 ;\n";
    os << "DESIGN " << (d.design_name.empty() ? "top" : d.design_name) << " ;\n";
    os << "UNITS DISTANCE MICRONS " << d.dbu_per_micron << " ;\n";
    os << "DIEAREA ( " << d.die[0].x << " " << d.die[0].y << " ) ( " << d.die[2].x << " "
       << d.die[2].y << " ) ;\n";
    os << "PINS " << d.ports.size() << " ;\n";
    for (const auto& p : d.ports) {
        os << "- " << p.name << " + NET " << p.name << " + DIRECTION "
           << (p.direction == PortDef::Input
                   ? "INPUT"
                   : p.direction == PortDef::Output ? "OUTPUT" : "INOUT")
           << " + PLACED ( " << p.location.x << " " << p.location.y << " ) N ;\n";
    }
    os << "END PINS\n";
    os << "COMPONENTS " << d.components.size() << " ;\n";
    for (const auto& c : d.components) {
        os << "- " << c.instance << " " << c.cell_class << " + PLACED ( " << c.location.x
           << " " << c.location.y << " ) " << c.orientation << " ;\n";
    }
    os << "END COMPONENTS\n";
    os << "NETS " << d.nets.size() << " ;\n";
    for (const auto& n : d.nets) {
        os << "- " << n.name;
        for (const auto& c : n.connections) {
            if (c.is_port)
                os << " ( PIN " << c.pin << " )";
            else
                os << " ( " << c.instance << " " << c.pin << " )";
        }
        os << " ;\n";
    }
    os << "END NETS\n";
    os << "END DESIGN\n";
    return os.str();
}

}  // namespace presta
