#pragma once

#include <random>
#include <string>
#include <vector>

#include "presta/common.hpp"
#include "presta/liberty.hpp"
#include "presta/physical.hpp"
#include "presta/sdc.hpp"

namespace presta {

// Random synthetic benchmark circuits: a placed single-clock netlist with a
// tree clock network, plus the matching constant-table cell libraries and
// constraints. Used by the `gen` subcommand and the property test corpus.
struct GenOptions {
    uint64_t seed = 1;
    int n_inputs = 2;
    int n_outputs = 2;
    int n_registers = 2;
    int n_combo = 4;
    int n_clock_buffers = 2;
    bool lut_7x7 = false;  // false: constant 1x1 tables
    double min_period = 0.5, max_period = 3.0;
    double max_uncertainty = 0.1;
    double max_output_delay = 0.3;
};

struct GenCircuit {
    LibertyLibrary early_lib;
    LibertyLibrary late_lib;
    LibrarySet libs;
    PhysicalDesign design;
    SdcConstraints sdc;
};

namespace gen_detail {

inline Lut constant_lut(double v) { return Lut{{0.0}, {0.0}, {v}}; }

inline Lut grid_lut(std::mt19937_64& rng, double base, size_t n) {
    Lut lut;
    std::uniform_real_distribution<double> jitter(0.0, base * 0.2);
    for (size_t i = 0; i < n; ++i) {
        lut.index1.push_back(0.01 + 0.02 * static_cast<double>(i));
        lut.index2.push_back(0.001 + 0.002 * static_cast<double>(i));
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            lut.values.push_back(base + 0.01 * static_cast<double>(i + j) + jitter(rng));
    return lut;
}

// one cell class with its four tables per arc, early values <= late
inline void add_arc(LibertyCell& ecell, LibertyCell& lcell, const std::string& in,
                    const std::string& out, std::mt19937_64& rng, bool big_luts) {
    std::uniform_real_distribution<double> delay(0.05, 0.3);
    std::uniform_real_distribution<double> derate(1.05, 1.5);
    std::uniform_real_distribution<double> trans(0.01, 0.08);
    TimingArc ea, la;
    ea.related_input_pin = la.related_input_pin = in;
    ea.output_pin = la.output_pin = out;
    for (int k = 0; k < 4; ++k) {
        double base = (k < 2) ? delay(rng) : trans(rng);
        double late = base * derate(rng);
        int slot = table_slot(k, false);
        if (big_luts) {
            ea.tables[slot] = grid_lut(rng, base, 7);
            la.tables[slot] = grid_lut(rng, late, 7);
            for (auto& v : la.tables[slot].values) v += base;  // keep late above early
        } else {
            ea.tables[slot] = constant_lut(base);
            la.tables[slot] = constant_lut(late);
        }
        ea.valid[slot] = la.valid[slot] = true;
    }
    ecell.arcs.push_back(std::move(ea));
    lcell.arcs.push_back(std::move(la));
}

inline void add_pin(LibertyCell& ecell, LibertyCell& lcell, const std::string& name,
                    LibertyPin::Dir dir, double cap, bool clock = false) {
    LibertyPin p;
    p.direction = dir;
    p.is_clock = clock;
    p.capacitance = {cap, cap, cap, cap};
    ecell.pins[name] = p;
    lcell.pins[name] = p;
}

}  // namespace gen_detail

inline GenCircuit generate_circuit(const GenOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    GenCircuit c;
    c.early_lib.name = "synth_early";
    c.late_lib.name = "synth_late";

    std::uniform_real_distribution<double> capd(0.001, 0.01);
    auto make_cell = [&](const std::string& name, auto&& fill) {
        LibertyCell e, l;
        e.name = l.name = name;
        fill(e, l);
        c.early_lib.cells[name] = e;
        c.late_lib.cells[name] = l;
    };
    make_cell("SINV", [&](LibertyCell& e, LibertyCell& l) {
        gen_detail::add_pin(e, l, "A", LibertyPin::Input, capd(rng));
        gen_detail::add_pin(e, l, "Y", LibertyPin::Output, 0.0);
        gen_detail::add_arc(e, l, "A", "Y", rng, opt.lut_7x7);
    });
    make_cell("SBUF", [&](LibertyCell& e, LibertyCell& l) {
        gen_detail::add_pin(e, l, "A", LibertyPin::Input, capd(rng));
        gen_detail::add_pin(e, l, "Y", LibertyPin::Output, 0.0);
        gen_detail::add_arc(e, l, "A", "Y", rng, opt.lut_7x7);
    });
    make_cell("SND2", [&](LibertyCell& e, LibertyCell& l) {
        gen_detail::add_pin(e, l, "A", LibertyPin::Input, capd(rng));
        gen_detail::add_pin(e, l, "B", LibertyPin::Input, capd(rng));
        gen_detail::add_pin(e, l, "Y", LibertyPin::Output, 0.0);
        gen_detail::add_arc(e, l, "A", "Y", rng, opt.lut_7x7);
        gen_detail::add_arc(e, l, "B", "Y", rng, opt.lut_7x7);
    });
    make_cell("SDFF", [&](LibertyCell& e, LibertyCell& l) {
        gen_detail::add_pin(e, l, "CLK", LibertyPin::Input, capd(rng), true);
        gen_detail::add_pin(e, l, "D", LibertyPin::Input, capd(rng));
        gen_detail::add_pin(e, l, "Q", LibertyPin::Output, 0.0);
        gen_detail::add_arc(e, l, "CLK", "Q", rng, opt.lut_7x7);
    });
    c.libs.early = c.early_lib.cells;
    c.libs.late = c.late_lib.cells;

    PhysicalDesign& d = c.design;
    d.design_name = "synth";
    d.dbu_per_micron = 1000;
    d.die = {Point{0, 0}, Point{100000, 0}, Point{100000, 100000}, Point{0, 100000}};
    std::uniform_int_distribution<int64_t> coord(0, 100000);

    auto add_port = [&](const std::string& name, PortDef::Dir dir) {
        PortDef p;
        p.name = name;
        p.direction = dir;
        p.location = {coord(rng), coord(rng)};
        p.placed = true;
        d.ports.push_back(p);
    };
    add_port("clk", PortDef::Input);
    for (int i = 0; i < opt.n_inputs; ++i) add_port("in" + std::to_string(i), PortDef::Input);
    for (int i = 0; i < opt.n_outputs; ++i)
        add_port("out" + std::to_string(i), PortDef::Output);

    auto add_comp = [&](const std::string& inst, const std::string& cls) {
        ComponentDef comp;
        comp.instance = inst;
        comp.cell_class = cls;
        comp.location = {coord(rng), coord(rng)};
        comp.placed = true;
        d.components.push_back(comp);
        return static_cast<int>(d.components.size()) - 1;
    };

    // signal = a net driver: a port or an instance output pin
    struct Signal {
        bool is_port;
        std::string instance;  // or port name
        std::string pin;
    };
    auto conn_of = [](const Signal& s) {
        NetConnection c2;
        c2.is_port = s.is_port;
        if (s.is_port)
            c2.pin = s.instance;
        else {
            c2.instance = s.instance;
            c2.pin = s.pin;
        }
        return c2;
    };
    std::vector<std::vector<NetConnection>> net_sinks;  // per signal
    std::vector<Signal> signals;
    auto new_signal = [&](const Signal& s) {
        signals.push_back(s);
        net_sinks.emplace_back();
        return static_cast<int>(signals.size()) - 1;
    };
    auto connect = [&](int sig, const std::string& inst, const std::string& pin) {
        NetConnection nc;
        nc.instance = inst;
        nc.pin = pin;
        net_sinks[static_cast<size_t>(sig)].push_back(nc);
    };
    auto connect_port = [&](int sig, const std::string& port) {
        NetConnection nc;
        nc.is_port = true;
        nc.pin = port;
        net_sinks[static_cast<size_t>(sig)].push_back(nc);
    };

    // clock tree: clk port plus a chain/tree of buffers
    int clk_sig = new_signal({true, "clk", ""});
    std::vector<int> clock_sigs{clk_sig};
    for (int i = 0; i < opt.n_clock_buffers; ++i) {
        std::string inst = "cb" + std::to_string(i);
        add_comp(inst, "SBUF");
        std::uniform_int_distribution<size_t> pick(0, clock_sigs.size() - 1);
        connect(clock_sigs[pick(rng)], inst, "A");
        clock_sigs.push_back(new_signal({false, inst, "Y"}));
    }

    // registers: CLK from a random clock-tree signal, Q becomes a data source
    std::vector<int> data_sigs;
    for (int i = 0; i < opt.n_inputs; ++i)
        data_sigs.push_back(new_signal({true, "in" + std::to_string(i), ""}));
    std::vector<std::string> reg_insts;
    for (int i = 0; i < opt.n_registers; ++i) {
        std::string inst = "r" + std::to_string(i);
        add_comp(inst, "SDFF");
        reg_insts.push_back(inst);
        std::uniform_int_distribution<size_t> pick(0, clock_sigs.size() - 1);
        connect(clock_sigs[pick(rng)], inst, "CLK");
        data_sigs.push_back(new_signal({false, inst, "Q"}));
    }

    // combinational DAG: each new cell draws inputs from earlier signals
    for (int i = 0; i < opt.n_combo; ++i) {
        std::string inst = "g" + std::to_string(i);
        bool two_input = (opt.n_combo > 1) && (rng() % 2 == 0);
        add_comp(inst, two_input ? "SND2" : "SINV");
        std::uniform_int_distribution<size_t> pick(0, data_sigs.size() - 1);
        connect(data_sigs[pick(rng)], inst, "A");
        if (two_input) connect(data_sigs[pick(rng)], inst, "B");
        data_sigs.push_back(new_signal({false, inst, "Y"}));
    }

    // sinks: register D pins and output ports tap random data signals
    {
        std::uniform_int_distribution<size_t> pick(0, data_sigs.size() - 1);
        for (const auto& inst : reg_insts) connect(data_sigs[pick(rng)], inst, "D");
        for (int i = 0; i < opt.n_outputs; ++i)
            connect_port(data_sigs[pick(rng)], "out" + std::to_string(i));
    }

    // every dangling output also feeds an extra sink so no endpoint is a
    // floating combinational pin
    for (size_t s = 0; s < signals.size(); ++s) {
        if (!signals[s].is_port && net_sinks[s].empty()) {
            std::string port = "dang" + std::to_string(s);
            add_port(port, PortDef::Output);
            connect_port(static_cast<int>(s), port);
        }
    }

    int net_no = 0;
    for (size_t s = 0; s < signals.size(); ++s) {
        if (net_sinks[s].empty()) continue;
        NetDef net;
        net.name = "n" + std::to_string(net_no++);
        net.connections.push_back(conn_of(signals[s]));
        for (auto& sink : net_sinks[s]) net.connections.push_back(sink);
        d.nets.push_back(std::move(net));
    }

    std::uniform_real_distribution<double> period(opt.min_period, opt.max_period);
    std::uniform_real_distribution<double> unc(0.0, opt.max_uncertainty);
    std::uniform_real_distribution<double> od(0.0, opt.max_output_delay);
    c.sdc.clock_period = period(rng);
    c.sdc.clock_name = "clk";
    c.sdc.clock_port = "clk";
    c.sdc.clock_uncertainty = unc(rng);
    for (const auto& p : d.ports)
        if (p.direction == PortDef::Output && rng() % 2 == 0)
            c.sdc.output_delays[p.name] = od(rng);
    return c;
}

// randomized option presets for the test corpus: small circuits, <= 50 pins
inline GenOptions small_circuit_options(uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    GenOptions opt;
    opt.seed = seed;
    opt.n_inputs = 1 + static_cast<int>(rng() % 3);
    opt.n_outputs = 1 + static_cast<int>(rng() % 2);
    opt.n_registers = 1 + static_cast<int>(rng() % 4);
    opt.n_combo = 1 + static_cast<int>(rng() % 5);
    opt.n_clock_buffers = static_cast<int>(rng() % 4);
    return opt;
}

}  // namespace presta
