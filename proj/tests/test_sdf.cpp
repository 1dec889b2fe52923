#include <catch2/catch_amalgamated.hpp>

#include "presta/sdf.hpp"

using namespace presta;

TEST_CASE("sdf: IOPATH min:typ:max triplets map to the four corners") {
    DelayLabels l = parse_sdf(R"(
(DELAYFILE
  (SDFVERSION "3.0")
  (TIMESCALE 1ns)
  (CELL (CELLTYPE "INV") (INSTANCE u1)
    (DELAY (ABSOLUTE
      (IOPATH A Y (0.1:0.15:0.3) (0.2:0.25:0.4))
    ))
  )
)
)");
    REQUIRE(l.cell_delays.size() == 1);
    FourCorner d = l.cell_delays.at({"u1", "A", "Y"});
    CHECK(d[ER] == 0.1);
    CHECK(d[LR] == 0.3);
    CHECK(d[EF] == 0.2);
    CHECK(d[LF] == 0.4);
}

TEST_CASE("sdf: single rvalue broadcasts to rise and fall, min == max") {
    DelayLabels l = parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE u2) (DELAY (ABSOLUTE (IOPATH A Y (0.5)))))
)
)");
    FourCorner d = l.cell_delays.at({"u2", "A", "Y"});
    CHECK(d[ER] == 0.5);
    CHECK(d[EF] == 0.5);
    CHECK(d[LR] == 0.5);
    CHECK(d[LF] == 0.5);
}

TEST_CASE("sdf: INTERCONNECT records land in net_delays") {
    DelayLabels l = parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE)
    (DELAY (ABSOLUTE
      (INTERCONNECT u1/Y u2/A (0.01::0.03) (0.02::0.04))
    ))
  )
)
)");
    REQUIRE(l.net_delays.size() == 1);
    FourCorner d = l.net_delays.at({"u1/Y", "u2/A"});
    CHECK(d[ER] == 0.01);
    CHECK(d[LR] == 0.03);
    CHECK(d[EF] == 0.02);
    CHECK(d[LF] == 0.04);
}

TEST_CASE("sdf: TIMESCALE normalizes to nanoseconds, glued or split unit") {
    DelayLabels glued = parse_sdf(R"(
(DELAYFILE (TIMESCALE 100ps)
  (CELL (INSTANCE u1) (DELAY (ABSOLUTE (IOPATH A Y (1:1:2)))))
)
)");
    FourCorner d = glued.cell_delays.at({"u1", "A", "Y"});
    CHECK(d[ER] == Catch::Approx(0.1).margin(1e-12));
    CHECK(d[LR] == Catch::Approx(0.2).margin(1e-12));

    DelayLabels split = parse_sdf(R"(
(DELAYFILE (TIMESCALE 1 ps)
  (CELL (INSTANCE u1) (DELAY (ABSOLUTE (IOPATH A Y (100)))))
)
)");
    CHECK(split.cell_delays.at({"u1", "A", "Y"})[LR] == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("sdf: negative or inverted early/late delays are rejected") {
    CHECK_THROWS_AS(parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE u1) (DELAY (ABSOLUTE (IOPATH A Y (-0.1)))))
)
)"),
                    ParseError);
    CHECK_THROWS_AS(parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE u1) (DELAY (ABSOLUTE (IOPATH A Y (0.3:0.2:0.1)))))
)
)"),
                    ParseError);
}

TEST_CASE("sdf: INCREMENT blocks are rejected") {
    CHECK_THROWS_AS(parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE u1) (DELAY (INCREMENT (IOPATH A Y (0.1)))))
)
)"),
                    ParseError);
}

TEST_CASE("sdf: duplicate arcs warn and the last record wins") {
    DelayLabels l = parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  (CELL (INSTANCE u1)
    (DELAY (ABSOLUTE
      (IOPATH A Y (0.1))
      (IOPATH A Y (0.2))
    ))
  )
)
)");
    CHECK(l.duplicate_count == 1);
    REQUIRE(l.warnings.size() == 1);
    CHECK(l.cell_delays.at({"u1", "A", "Y"})[LR] == 0.2);
}

TEST_CASE("sdf: inline LABEL comment lines are harvested") {
    DelayLabels l = parse_sdf(R"(
(DELAYFILE (TIMESCALE 1ns)
  // LABEL u1/Y AT LR 1.25
  // LABEL u1/Y AT ER 1.0
  // LABEL out0 RAT LR 2.5
  (CELL (INSTANCE u1) (DELAY (ABSOLUTE (IOPATH A Y (0.1)))))
)
)");
    CHECK(l.pin_at.at("u1/Y")[LR] == 1.25);
    CHECK(l.pin_at.at("u1/Y")[ER] == 1.0);
    CHECK(l.pin_rat.at("out0")[LR] == 2.5);
    CHECK(l.cell_delays.size() == 1);
}

TEST_CASE("label sidecar: records parse per quantity and corner") {
    DelayLabels l = parse_label_sidecar(R"(
# comment line
u1/A AT ER 0.5
u1/A AT LR 0.7  # trailing comment
u1/A SLEW LR 0.03
out0 RAT LF 1.5
)");
    CHECK(l.pin_at.at("u1/A")[ER] == 0.5);
    CHECK(l.pin_at.at("u1/A")[LR] == 0.7);
    CHECK(l.pin_slew.at("u1/A")[LR] == 0.03);
    CHECK(l.pin_rat.at("out0")[LF] == 1.5);
    CHECK(l.duplicate_count == 0);
}

TEST_CASE("label sidecar: exact duplicates count, last wins") {
    DelayLabels l = parse_label_sidecar("p AT LR 1.0\np AT LR 2.0\np AT ER 0.5\n");
    CHECK(l.duplicate_count == 1);
    CHECK(l.pin_at.at("p")[LR] == 2.0);
    CHECK(l.pin_at.at("p")[ER] == 0.5);
}

TEST_CASE("label sidecar: malformed records raise one error naming the first") {
    try {
        parse_label_sidecar("p AT LR 1.0\njunk\np WHAT LR 1.0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("2") != std::string::npos);      // two bad records
        CHECK(msg.find("line 2") != std::string::npos);  // first one
    }
}

TEST_CASE("sdf: emit/parse round-trip preserves delays and labels") {
    DelayLabels l;
    l.cell_delays[{"u1", "A", "Y"}] = {0.1, 0.2, 0.3, 0.4};
    l.cell_delays[{"u2", "B", "Y"}] = {0.0, 0.0, 0.05, 0.06};
    l.net_delays[{"u1/Y", "u2/B"}] = {0.01, 0.01, 0.02, 0.02};
    l.pin_at["u2/Y"] = {1.0, 1.1, 1.2, 1.3};
    l.pin_rat["out0"] = {2.0, 2.0, 2.0, 2.0};
    l.pin_slew["u2/Y"] = {0.01, 0.01, 0.02, 0.02};

    DelayLabels again = parse_sdf(emit_sdf(l));
    CHECK(again.cell_delays == l.cell_delays);
    CHECK(again.net_delays == l.net_delays);
    CHECK(again.pin_at == l.pin_at);
    CHECK(again.pin_rat == l.pin_rat);
    CHECK(again.pin_slew == l.pin_slew);

    DelayLabels side = parse_label_sidecar(emit_label_sidecar(l));
    CHECK(side.pin_at == l.pin_at);
    CHECK(side.pin_rat == l.pin_rat);
    CHECK(side.pin_slew == l.pin_slew);
}
