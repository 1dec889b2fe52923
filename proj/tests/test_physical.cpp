#include <catch2/catch_amalgamated.hpp>

#include "presta/generator.hpp"
#include "presta/physical.hpp"

using namespace presta;

namespace {

const char* kSmallDef = R"(
VERSION 5.8 ;
DESIGN top ;
UNITS DISTANCE MICRONS 1000 ;
DIEAREA ( 0 0 ) ( 200000 100000 ) ;
PINS 2 ;
- in0 + NET in0 + DIRECTION INPUT + PLACED ( 0 5000 ) N ;
- out0 + NET out0 + DIRECTION OUTPUT + PLACED ( 200000 5000 ) N ;
END PINS
COMPONENTS 1 ;
- u1 INV + PLACED ( 100000 50000 ) N ;
END COMPONENTS
NETS 2 ;
- in0 ( PIN in0 ) ( u1 A ) ;
- out0 ( u1 Y ) ( PIN out0 ) ;
END NETS
END DESIGN
)";

LibrarySet inv_libs() {
    const char* lib = R"(
library (l) {
  cell (INV) {
    pin (A) { direction : input ; capacitance : 0.002 ; }
    pin (Y) { direction : output ; }
  }
}
)";
    LibrarySet libs;
    libs.early = parse_liberty(lib).cells;
    libs.late = parse_liberty(lib).cells;
    return libs;
}

}  // namespace

TEST_CASE("def: small design parses sections and units") {
    PhysicalDesign d = parse_def(kSmallDef);
    CHECK(d.design_name == "top");
    CHECK(d.dbu_per_micron == 1000);
    CHECK(d.die_width() == 200000);
    CHECK(d.die_height() == 100000);
    REQUIRE(d.ports.size() == 2);
    CHECK(d.ports[0].name == "in0");
    CHECK(d.ports[0].direction == PortDef::Input);
    CHECK(d.ports[0].location == Point{0, 5000});
    REQUIRE(d.components.size() == 1);
    CHECK(d.components[0].instance == "u1");
    CHECK(d.components[0].cell_class == "INV");
    CHECK(d.components[0].location == Point{100000, 50000});
    REQUIRE(d.nets.size() == 2);
    CHECK(d.nets[0].connections.size() == 2);
    CHECK(d.nets[0].connections[0].is_port);
    CHECK(d.warnings.empty());
}

TEST_CASE("def: rectilinear DIEAREA outline reduces to its bounding box") {
    PhysicalDesign d = parse_def(R"(
DIEAREA ( 0 0 ) ( 50 0 ) ( 50 30 ) ( 100 30 ) ( 100 80 ) ( 0 80 ) ;
NETS 0 ;
END NETS
)");
    CHECK(d.die[0] == Point{0, 0});
    CHECK(d.die[2] == Point{100, 80});
}

TEST_CASE("def: missing DIEAREA or NETS is fatal") {
    CHECK_THROWS_AS(parse_def("NETS 0 ;\nEND NETS\n"), ParseError);
    CHECK_THROWS_AS(parse_def("DIEAREA ( 0 0 ) ( 1 1 ) ;\n"), ParseError);
}

TEST_CASE("def: unplaced component warns and defaults to the origin") {
    PhysicalDesign d = parse_def(R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
COMPONENTS 1 ;
- u1 INV ;
END COMPONENTS
NETS 0 ;
END NETS
)");
    REQUIRE(d.warnings.size() == 1);
    CHECK(d.warnings[0].find("u1") != std::string::npos);
    CHECK(d.components[0].location == Point{0, 0});
}

TEST_CASE("def: net referencing an undeclared component is fatal") {
    CHECK_THROWS_AS(parse_def(R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
NETS 1 ;
- n1 ( ghost A ) ;
END NETS
)"),
                    ParseError);
}

TEST_CASE("def: driver resolution picks output pins and input ports") {
    PhysicalDesign d = resolve_net_drivers(parse_def(kSmallDef), inv_libs());
    CHECK(d.net_diagnostics.empty());
    REQUIRE(d.nets.size() == 2);
    // net in0: the input port drives
    CHECK(d.nets[0].driver == 0);
    CHECK(d.nets[0].connections[0].is_port);
    // net out0: the INV output pin drives
    CHECK(d.nets[1].driver == 0);
    CHECK(d.nets[1].connections[0].pin == "Y");
}

TEST_CASE("def: undriven and multi-driver nets are flagged and excluded") {
    PhysicalDesign raw = parse_def(R"(
DIEAREA ( 0 0 ) ( 100 100 ) ;
COMPONENTS 2 ;
- u1 INV + PLACED ( 10 10 ) N ;
- u2 INV + PLACED ( 20 20 ) N ;
END COMPONENTS
NETS 2 ;
- undriven ( u1 A ) ( u2 A ) ;
- multi ( u1 Y ) ( u2 Y ) ;
END NETS
)");
    PhysicalDesign d = resolve_net_drivers(std::move(raw), inv_libs());
    REQUIRE(d.net_diagnostics.size() == 2);
    CHECK(d.net_diagnostics[0].find("undriven") != std::string::npos);
    CHECK(d.net_diagnostics[1].find("multi-driver") != std::string::npos);
    CHECK(d.nets[0].driver == -1);
    CHECK(d.nets[1].driver == -1);
}

TEST_CASE("def: emit/parse round-trip preserves coordinates and topology") {
    PhysicalDesign d = parse_def(kSmallDef);
    PhysicalDesign again = parse_def(emit_def(d));
    CHECK(again.design_name == d.design_name);
    CHECK(again.dbu_per_micron == d.dbu_per_micron);
    CHECK(again.die == d.die);
    REQUIRE(again.ports.size() == d.ports.size());
    for (size_t i = 0; i < d.ports.size(); ++i) {
        CHECK(again.ports[i].name == d.ports[i].name);
        CHECK(again.ports[i].direction == d.ports[i].direction);
        CHECK(again.ports[i].location == d.ports[i].location);
    }
    REQUIRE(again.components.size() == d.components.size());
    for (size_t i = 0; i < d.components.size(); ++i) {
        CHECK(again.components[i].instance == d.components[i].instance);
        CHECK(again.components[i].cell_class == d.components[i].cell_class);
        CHECK(again.components[i].location == d.components[i].location);
    }
    REQUIRE(again.nets.size() == d.nets.size());
    for (size_t i = 0; i < d.nets.size(); ++i) {
        CHECK(again.nets[i].name == d.nets[i].name);
        REQUIRE(again.nets[i].connections.size() == d.nets[i].connections.size());
        for (size_t k = 0; k < d.nets[i].connections.size(); ++k) {
            CHECK(again.nets[i].connections[k].is_port == d.nets[i].connections[k].is_port);
            CHECK(again.nets[i].connections[k].instance ==
                  d.nets[i].connections[k].instance);
            CHECK(again.nets[i].connections[k].pin == d.nets[i].connections[k].pin);
        }
    }
}

TEST_CASE("def: generated circuits round-trip and resolve all drivers") {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        GenCircuit c = generate_circuit(small_circuit_options(seed));
        PhysicalDesign parsed = parse_def(emit_def(c.design));
        CHECK(parsed.nets.size() == c.design.nets.size());
        PhysicalDesign resolved = resolve_net_drivers(std::move(parsed), c.libs);
        CHECK(resolved.net_diagnostics.empty());
        for (const auto& net : resolved.nets) CHECK(net.driver >= 0);
    }
}
