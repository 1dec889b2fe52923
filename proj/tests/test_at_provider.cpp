#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "oracle.hpp"
#include "presta/at_provider.hpp"
#include "presta/generator.hpp"

using namespace presta;

namespace {

std::string lib_with_delay(double inv_delay, double nd2_delay) {
    std::ostringstream os;
    os.precision(12);
    os << R"(
library (l) {
  cell (INV) {
    pin (A) { direction : input ; capacitance : 0.002 ; }
    pin (Y) {
      direction : output ;
      timing () {
        related_pin : "A" ;
        cell_rise (x) { index_1 ("0"); index_2 ("0"); values (")" << inv_delay << R"("); }
        cell_fall (x) { index_1 ("0"); index_2 ("0"); values (")" << inv_delay << R"("); }
        rise_transition (x) { index_1 ("0"); index_2 ("0"); values ("0.02"); }
        fall_transition (x) { index_1 ("0"); index_2 ("0"); values ("0.02"); }
      }
    }
  }
  cell (ND2) {
    pin (A) { direction : input ; capacitance : 0.002 ; }
    pin (B) { direction : input ; capacitance : 0.002 ; }
    pin (Y) {
      direction : output ;
      timing () {
        related_pin : "A B" ;
        cell_rise (x) { index_1 ("0"); index_2 ("0"); values (")" << nd2_delay << R"("); }
        cell_fall (x) { index_1 ("0"); index_2 ("0"); values (")" << nd2_delay << R"("); }
      }
    }
  }
}
)";
    return os.str();
}

TimingGraph make_graph(const std::string& lib_text, const std::string& def_text) {
    LibrarySet libs;
    libs.early = parse_liberty(lib_text).cells;
    libs.late = parse_liberty(lib_text).cells;
    PhysicalDesign d = resolve_net_drivers(parse_def(def_text), libs);
    TimingGraph g = build_graph(d, libs);
    remove_cycles(g);
    compute_levels(g);
    return g;
}

const char* kInvDef = R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
PINS 2 ;
- in0 + DIRECTION INPUT + PLACED ( 0 0 ) N ;
- out0 + DIRECTION OUTPUT + PLACED ( 90 90 ) N ;
END PINS
COMPONENTS 1 ;
- u1 INV + PLACED ( 50 50 ) N ;
END COMPONENTS
NETS 2 ;
- n1 ( PIN in0 ) ( u1 A ) ;
- n2 ( u1 Y ) ( PIN out0 ) ;
END NETS
)";

SdcConstraints clockless_sdc() {
    SdcConstraints sdc;
    sdc.clock_period = 1.0;
    sdc.clock_port = "clk_none";
    return sdc;
}

}  // namespace

TEST_CASE("at_from_labels copies labels onto graph nodes") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    DelayLabels labels;
    for (const auto& n : g.nodes) {
        labels.pin_at[n.name] = {0.5, 0.6, 0.7, 0.8};
        labels.pin_slew[n.name] = {0.01, 0.01, 0.02, 0.02};
    }
    PinTiming t = at_from_labels(g, labels, true);
    CHECK(t.source == AtSource::Labels);
    CHECK(t.warnings.empty());
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(t.at[i] == FourCorner{0.5, 0.6, 0.7, 0.8});
        CHECK(t.slew[i] == FourCorner{0.01, 0.01, 0.02, 0.02});
    }
}

TEST_CASE("at_from_labels strict mode fails on missing pins, listing them") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    DelayLabels labels;
    labels.pin_at["in0"] = {0, 0, 0, 0};
    try {
        at_from_labels(g, labels, true);
        FAIL("expected ArgError");
    } catch (const ArgError& e) {
        std::string msg = e.what();
        CHECK(msg.find("3 pin(s)") != std::string::npos);
        CHECK(msg.find("u1/A") != std::string::npos);
    }
}

TEST_CASE("at_from_labels permissive mode fills gaps and warns") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    DelayLabels labels;
    labels.pin_at["in0"] = {0.1, 0.1, 0.1, 0.1};
    labels.pin_at["nonexistent/pin"] = {9, 9, 9, 9};
    PinTiming t = at_from_labels(g, labels, false, 0.07);
    REQUIRE(t.warnings.size() == 2);
    CHECK(t.warnings[0].find("filled with AT 0") != std::string::npos);
    CHECK(t.warnings[1].find("not present in graph") != std::string::npos);
    int a = g.find_node("u1/A");
    CHECK(t.at[static_cast<size_t>(a)] == FourCorner{});
    CHECK(t.slew[static_cast<size_t>(a)] == FourCorner{0.07, 0.07, 0.07, 0.07});
}

TEST_CASE("at_from_external ingests the sidecar record format") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    PinTiming t = at_from_external(g, "in0 AT LR 0.25\n", false);
    CHECK(t.source == AtSource::External);
    CHECK(t.at[static_cast<size_t>(g.find_node("in0"))][LR] == 0.25);
}

TEST_CASE("propagate_at: single inverter adds the cell delay") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    SdcConstraints sdc = clockless_sdc();
    sdc.input_delays["in0"] = 1.4;
    PinTiming t = propagate_at(g, sdc);
    CHECK(t.at[static_cast<size_t>(g.find_node("in0"))][LR] == 1.4);
    CHECK(t.at[static_cast<size_t>(g.find_node("u1/A"))][LR] == 1.4);
    CHECK(t.at[static_cast<size_t>(g.find_node("u1/Y"))][LR] ==
          Catch::Approx(1.5).margin(1e-15));
    CHECK(t.at[static_cast<size_t>(g.find_node("out0"))][LR] ==
          Catch::Approx(1.5).margin(1e-15));
    // constant tables propagate the transition table value
    CHECK(t.slew[static_cast<size_t>(g.find_node("u1/Y"))][LR] == 0.02);
}

TEST_CASE("propagate_at: reconvergence merges max late, min early") {
    const char* def = R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
PINS 3 ;
- in0 + DIRECTION INPUT + PLACED ( 0 0 ) N ;
- in1 + DIRECTION INPUT + PLACED ( 0 50 ) N ;
- out0 + DIRECTION OUTPUT + PLACED ( 90 90 ) N ;
END PINS
COMPONENTS 1 ;
- u1 ND2 + PLACED ( 50 50 ) N ;
END COMPONENTS
NETS 3 ;
- n1 ( PIN in0 ) ( u1 A ) ;
- n2 ( PIN in1 ) ( u1 B ) ;
- n3 ( u1 Y ) ( PIN out0 ) ;
END NETS
)";
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.3), def);
    SdcConstraints sdc = clockless_sdc();
    sdc.input_delays["in0"] = 2.0;
    sdc.input_delays["in1"] = 1.0;
    PinTiming t = propagate_at(g, sdc);
    size_t y = static_cast<size_t>(g.find_node("u1/Y"));
    CHECK(t.at[y][LR] == Catch::Approx(2.3).margin(1e-15));
    CHECK(t.at[y][LF] == Catch::Approx(2.3).margin(1e-15));
    CHECK(t.at[y][ER] == Catch::Approx(1.3).margin(1e-15));
    CHECK(t.at[y][EF] == Catch::Approx(1.3).margin(1e-15));
}

TEST_CASE("propagate_at: three-inverter chain accumulates delays") {
    const char* def = R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
PINS 2 ;
- in0 + DIRECTION INPUT + PLACED ( 0 0 ) N ;
- out0 + DIRECTION OUTPUT + PLACED ( 90 90 ) N ;
END PINS
COMPONENTS 3 ;
- u1 INV + PLACED ( 20 20 ) N ;
- u2 INV + PLACED ( 40 40 ) N ;
- u3 INV + PLACED ( 60 60 ) N ;
END COMPONENTS
NETS 4 ;
- n0 ( PIN in0 ) ( u1 A ) ;
- n1 ( u1 Y ) ( u2 A ) ;
- n2 ( u2 Y ) ( u3 A ) ;
- n3 ( u3 Y ) ( PIN out0 ) ;
END NETS
)";
    TimingGraph g = make_graph(lib_with_delay(0.5, 0.2), def);
    PinTiming t = propagate_at(g, clockless_sdc());
    CHECK(t.at[static_cast<size_t>(g.find_node("out0"))][LR] ==
          Catch::Approx(1.5).margin(1e-15));
}

TEST_CASE("propagate_at: optional linear net delay adds length * coefficient") {
    TimingGraph g = make_graph(lib_with_delay(0.1, 0.2), kInvDef);
    PropagateOptions opt;
    opt.net_delay_per_micron = 0.001;
    PinTiming t = propagate_at(g, clockless_sdc(), opt);
    // in0 (0,0) to u1 (50,50): 100 dbu at 1000 dbu/um = 0.1 um
    double expected_a = 0.001 * 0.1;
    CHECK(t.at[static_cast<size_t>(g.find_node("u1/A"))][LR] ==
          Catch::Approx(expected_a).margin(1e-15));
}

TEST_CASE("propagate_at requires levels") {
    LibrarySet libs;
    libs.early = parse_liberty(lib_with_delay(0.1, 0.2)).cells;
    libs.late = libs.early;
    PhysicalDesign d = resolve_net_drivers(parse_def(kInvDef), libs);
    TimingGraph g = build_graph(d, libs);
    remove_cycles(g);
    CHECK_THROWS_AS(propagate_at(g, clockless_sdc()), InternalError);
}

TEST_CASE("propagate_at matches the exhaustive path oracle") {
    // not bitwise: build_graph resamples the 1x1 source tables to 7x7, so
    // the engine interpolates among equal values and can land one ulp away
    // from the stored constant the oracle reads directly
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        GenCircuit c = generate_circuit(small_circuit_options(seed));
        PhysicalDesign d = resolve_net_drivers(c.design, c.libs);
        TimingGraph g = build_graph(d, c.libs);
        remove_cycles(g);
        compute_levels(g);
        PinTiming t = propagate_at(g, c.sdc);
        testing::OracleOptions oopt;
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            for (int corner = 0; corner < 4; ++corner) {
                double expect =
                    testing::oracle_at(g, static_cast<int>(i), corner, c.sdc, oopt);
                INFO("seed " << seed << " node " << g.nodes[i].name << " corner "
                             << corner_name(corner));
                CHECK(t.at[i][corner] == Catch::Approx(expect).margin(1e-12));
            }
        }
    }
}

TEST_CASE("propagate_at: early AT never exceeds late AT on generated circuits") {
    for (uint64_t seed = 30; seed <= 60; ++seed) {
        GenCircuit c = generate_circuit(small_circuit_options(seed));
        PhysicalDesign d = resolve_net_drivers(c.design, c.libs);
        TimingGraph g = build_graph(d, c.libs);
        remove_cycles(g);
        compute_levels(g);
        PinTiming t = propagate_at(g, c.sdc);
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            CHECK(t.at[i][ER] <= t.at[i][LR]);
            CHECK(t.at[i][EF] <= t.at[i][LF]);
        }
    }
}

TEST_CASE("propagate_at: AT is monotone along every forward edge") {
    for (uint64_t seed = 70; seed <= 80; ++seed) {
        GenCircuit c = generate_circuit(small_circuit_options(seed));
        PhysicalDesign d = resolve_net_drivers(c.design, c.libs);
        TimingGraph g = build_graph(d, c.libs);
        remove_cycles(g);
        compute_levels(g);
        PinTiming t = propagate_at(g, c.sdc);
        // delays are nonnegative, so the late AT of a node is at least the
        // smallest late AT among its predecessors
        for (size_t u = 0; u < g.nodes.size(); ++u) {
            if (g.bwd[u].empty()) continue;
            double min_pred = std::numeric_limits<double>::infinity();
            for (const auto& e : g.bwd[u])
                min_pred = std::min(min_pred, t.at[static_cast<size_t>(e.other)][LR]);
            CHECK(t.at[u][LR] >= min_pred);
        }
    }
}
