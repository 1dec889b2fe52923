#include <catch2/catch_amalgamated.hpp>

#include "presta/sdc.hpp"

using namespace presta;

TEST_CASE("sdc: basic clock, uncertainty, and output delay") {
    SdcConstraints sdc = parse_sdc(R"(
create_clock -name core_clk -period 2.0 [get_ports clk]
set_clock_uncertainty 0.1 [get_clocks core_clk]
set_output_delay -max 0.5 -clock core_clk [get_ports out0]
)");
    CHECK(sdc.clock_period == 2.0);
    CHECK(sdc.clock_name == "core_clk");
    CHECK(sdc.clock_port == "clk");
    CHECK(sdc.clock_uncertainty == 0.1);
    CHECK(sdc.output_delay("out0") == 0.5);
    CHECK(sdc.output_delay("other") == 0.0);  // unconstrained PO defaults to 0
    CHECK(sdc.ignored_commands.empty());
}

TEST_CASE("sdc: all_outputs / all_inputs forms") {
    SdcConstraints sdc = parse_sdc(R"(
create_clock -period 1.5 [get_ports clk]
set_output_delay -max 0.2 [all_outputs]
set_input_delay -max 0.1 [all_inputs]
)");
    CHECK(sdc.clock_name == "clk");  // defaults to the port
    CHECK(sdc.all_outputs_delay == 0.2);
    CHECK(sdc.all_inputs_delay == 0.1);
    CHECK(sdc.output_delay("any") == 0.2);
    CHECK(sdc.input_delay("any") == 0.1);
    // explicit per-port entries would override the blanket value
}

TEST_CASE("sdc: braced multi-port get_ports assigns all names") {
    SdcConstraints sdc = parse_sdc(R"(
create_clock -period 1.0 clk
set_output_delay -max 0.3 [get_ports {a b c}]
)");
    CHECK(sdc.output_delay("a") == 0.3);
    CHECK(sdc.output_delay("b") == 0.3);
    CHECK(sdc.output_delay("c") == 0.3);
}

TEST_CASE("sdc: -min delays are ignored, late analysis keeps -max") {
    SdcConstraints sdc = parse_sdc(R"(
create_clock -period 1.0 [get_ports clk]
set_output_delay -min 0.05 [get_ports out0]
set_output_delay -max 0.4 [get_ports out0]
)");
    CHECK(sdc.output_delay("out0") == 0.4);
}

TEST_CASE("sdc: unknown commands are collected, not fatal") {
    SdcConstraints sdc = parse_sdc(R"(
create_clock -period 1.0 [get_ports clk]
set_false_path -from [get_ports in0]
set_max_fanout 20 [current_design]
)");
    REQUIRE(sdc.ignored_commands.size() == 2);
    CHECK(sdc.ignored_commands[0] == "set_false_path");
    CHECK(sdc.ignored_commands[1] == "set_max_fanout");
}

TEST_CASE("sdc: duplicate create_clock is fatal") {
    CHECK_THROWS_AS(parse_sdc("create_clock -period 1 clk\ncreate_clock -period 2 clk2\n"),
                    ParseError);
}

TEST_CASE("sdc: missing create_clock or bad period is fatal") {
    CHECK_THROWS_AS(parse_sdc("set_output_delay -max 0.1 [get_ports o]\n"), ParseError);
    CHECK_THROWS_AS(parse_sdc("create_clock -period 0 clk\n"), ParseError);
    CHECK_THROWS_AS(parse_sdc("create_clock clk\n"), ParseError);
}

TEST_CASE("sdc: comments and blank lines are skipped") {
    SdcConstraints sdc = parse_sdc(R"(
# setup constraints
create_clock -period 2.5 [get_ports clk]   # the only clock

)");
    CHECK(sdc.clock_period == 2.5);
}

TEST_CASE("sdc: emit/parse round-trip preserves the constraint set") {
    SdcConstraints sdc;
    sdc.clock_period = 1.75;
    sdc.clock_name = "clk";
    sdc.clock_port = "clk";
    sdc.clock_uncertainty = 0.05;
    sdc.output_delays["out0"] = 0.2;
    sdc.output_delays["out1"] = 0.35;
    sdc.input_delays["in0"] = 0.1;
    sdc.all_outputs_delay = 0.15;

    SdcConstraints again = parse_sdc(emit_sdc(sdc));
    CHECK(again.clock_period == sdc.clock_period);
    CHECK(again.clock_name == sdc.clock_name);
    CHECK(again.clock_port == sdc.clock_port);
    CHECK(again.clock_uncertainty == sdc.clock_uncertainty);
    CHECK(again.output_delays == sdc.output_delays);
    CHECK(again.input_delays == sdc.input_delays);
    CHECK(again.all_outputs_delay == sdc.all_outputs_delay);
    CHECK(again.all_inputs_delay == sdc.all_inputs_delay);
}
