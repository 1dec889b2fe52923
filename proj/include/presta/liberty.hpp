#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "presta/common.hpp"
#include "presta/lut.hpp"

namespace presta {

// The four NLDM table kinds extracted from a timing group.
enum TableKind : int { CellRise = 0, CellFall = 1, RiseTransition = 2, FallTransition = 3 };

inline const char* table_kind_name(int k) {
    static const char* names[4] = {"cell_rise", "cell_fall", "rise_transition",
                                   "fall_transition"};
    return names[k];
}

// Slot layout: kind + 4 for the late-library table of that kind.
inline int table_slot(int kind, bool late) { return kind + (late ? 4 : 0); }

struct TimingArc {
    std::string related_input_pin;
    std::string output_pin;
    std::array<Lut, 8> tables;
    std::array<bool, 8> valid{};

    int valid_count() const {
        int n = 0;
        for (bool b : valid) n += b;
        return n;
    }
};

struct LibertyPin {
    enum Dir { Input, Output, Inout };
    Dir direction = Input;
    FourCorner capacitance;  // EL/RF slots
    bool is_clock = false;
};

inline bool looks_like_clock_name(const std::string& pin) {
    return pin == "CLK" || pin == "CK" || pin == "CLKN";
}

struct LibertyCell {
    std::string name;
    std::map<std::string, LibertyPin> pins;
    std::vector<TimingArc> arcs;
};

struct LibertyLibrary {
    std::string name;
    std::map<std::string, LibertyCell> cells;
    std::vector<std::string> warnings;
};

struct LibrarySet {
    std::map<std::string, LibertyCell> early;
    std::map<std::string, LibertyCell> late;
};

namespace liberty_detail {

struct Token {
    std::string text;
    int line = 0;
    bool quoted = false;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    out.reserve(src.size() / 6);
    int line = 1;
    size_t i = 0;
    size_t n = src.size();
    auto is_delim = [](char c) {
        return c == '(' || c == ')' || c == '{' || c == '}' || c == ':' || c == ';' || c == ',';
    };
    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == '\\' && i + 1 < n && (src[i + 1] == '\n' || src[i + 1] == '\r')) {
            ++i;  // line continuation
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            i = (i + 1 < n) ? i + 2 : n;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
        } else if (c == '"') {
            size_t start = ++i;
            while (i < n && src[i] != '"') {
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i >= n) throw ParseError("liberty: unterminated string", line);
            std::string body(src.substr(start, i - start));
            // strip continuations inside quoted number lists
            std::string clean;
            clean.reserve(body.size());
            for (char b : body)
                if (b != '\\') clean.push_back(b);
            out.push_back({clean, line, true});
            ++i;
        } else if (is_delim(c)) {
            out.push_back({std::string(1, c), line, false});
            ++i;
        } else {
            size_t start = i;
            while (i < n && !std::isspace(static_cast<unsigned char>(src[i])) &&
                   !is_delim(src[i]) && src[i] != '"')
                ++i;
            out.push_back({std::string(src.substr(start, i - start)), line, false});
        }
    }
    return out;
}

inline std::vector<double> parse_number_list(const std::string& s, int line) {
    std::vector<double> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ','))
            ++i;
        if (i >= s.size()) break;
        size_t end;
        try {
            out.push_back(std::stod(s.substr(i), &end));
        } catch (const std::exception&) {
            throw ParseError("liberty: bad number in list '" + s + "'", line);
        }
        i += end;
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    LibertyLibrary run() {
        LibertyLibrary lib;
        while (!eof()) {
            if (peek().text == "library") {
                next();
                auto args = group_args();
                if (!args.empty()) lib.name = args[0];
                expect("{");
                parse_library_body(lib);
            } else {
                skip_statement();
            }
        }
        return lib;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> templates_;

    bool eof() const { return pos_ >= toks_.size(); }
    const Token& peek() const {
        if (eof()) throw ParseError("liberty: unexpected end of input (unbalanced braces?)",
                                    toks_.empty() ? 0 : toks_.back().line);
        return toks_[pos_];
    }
    Token next() {
        Token t = peek();
        ++pos_;
        return t;
    }
    void expect(const std::string& s) {
        Token t = next();
        if (t.text != s)
            throw ParseError("liberty: expected '" + s + "', got '" + t.text + "'", t.line);
    }
    bool accept(const std::string& s) {
        if (!eof() && peek().text == s) {
            ++pos_;
            return true;
        }
        return false;
    }

    // after the group keyword: '(' args ')'
    std::vector<std::string> group_args() {
        expect("(");
        std::vector<std::string> args;
        while (!accept(")")) {
            Token t = next();
            if (t.text != ",") args.push_back(t.text);
        }
        return args;
    }

    // statement of unknown kind; skip it entirely (group or attribute)
    void skip_statement() {
        next();  // name
        if (eof()) return;
        if (peek().text == ":") {
            next();
            while (!eof() && peek().text != ";" && peek().text != "}" && peek().text != "{")
                next();
            accept(";");
        } else if (peek().text == "(") {
            while (!eof() && peek().text != ")") next();
            expect(")");
            if (!eof() && peek().text == "{")
                skip_group_body();
            else
                accept(";");
        } else {
            accept(";");
        }
    }

    void skip_group_body() {
        expect("{");
        int depth = 1;
        while (depth > 0) {
            Token t = next();
            if (t.text == "{") ++depth;
            if (t.text == "}") --depth;
        }
    }

    void parse_library_body(LibertyLibrary& lib) {
        while (!accept("}")) {
            const std::string head = peek().text;
            if (head == "cell") {
                next();
                auto args = group_args();
                expect("{");
                LibertyCell cell;
                cell.name = args.empty() ? "" : args[0];
                parse_cell_body(cell, lib);
                lib.cells[cell.name] = std::move(cell);
            } else if (head == "lu_table_template") {
                next();
                auto args = group_args();
                std::string tname = args.empty() ? "" : args[0];
                expect("{");
                std::vector<double> i1, i2;
                while (!accept("}")) {
                    Token t = peek();
                    if (t.text == "index_1" || t.text == "index_2") {
                        next();
                        auto idx = complex_values();
                        std::vector<double> vals;
                        for (auto& s : idx)
                            for (double d : parse_number_list(s, t.line)) vals.push_back(d);
                        (t.text == "index_1" ? i1 : i2) = std::move(vals);
                        accept(";");
                    } else {
                        skip_statement();
                    }
                }
                templates_[tname] = {std::move(i1), std::move(i2)};
            } else {
                skip_statement();
            }
        }
    }

    std::vector<std::string> complex_values() {
        expect("(");
        std::vector<std::string> out;
        while (!accept(")")) {
            Token t = next();
            if (t.text != ",") out.push_back(t.text);
        }
        return out;
    }

    void parse_cell_body(LibertyCell& cell, LibertyLibrary& lib) {
        while (!accept("}")) {
            if (peek().text == "pin") {
                next();
                auto args = group_args();
                std::string pin_name = args.empty() ? "" : args[0];
                expect("{");
                parse_pin_body(cell, pin_name, lib);
            } else {
                skip_statement();
            }
        }
    }

    void parse_pin_body(LibertyCell& cell, const std::string& pin_name, LibertyLibrary& lib) {
        LibertyPin pin;
        bool cap_seen = false, rise_cap_seen = false, fall_cap_seen = false;
        double cap = 0, rise_cap = 0, fall_cap = 0;
        std::vector<TimingArc> arcs;
        while (!accept("}")) {
            Token t = peek();
            if (t.text == "direction") {
                next();
                expect(":");
                std::string d = next().text;
                accept(";");
                if (d == "input")
                    pin.direction = LibertyPin::Input;
                else if (d == "output")
                    pin.direction = LibertyPin::Output;
                else
                    pin.direction = LibertyPin::Inout;
            } else if (t.text == "capacitance") {
                next();
                expect(":");
                cap = std::stod(next().text);
                cap_seen = true;
                accept(";");
            } else if (t.text == "rise_capacitance") {
                next();
                expect(":");
                rise_cap = std::stod(next().text);
                rise_cap_seen = true;
                accept(";");
            } else if (t.text == "fall_capacitance") {
                next();
                expect(":");
                fall_cap = std::stod(next().text);
                fall_cap_seen = true;
                accept(";");
            } else if (t.text == "clock") {
                next();
                expect(":");
                std::string v = next().text;
                accept(";");
                pin.is_clock = (v == "true" || v == "TRUE" || v == "1");
            } else if (t.text == "timing") {
                next();
                group_args();
                expect("{");
                parse_timing_body(cell.name, pin_name, arcs);
            } else {
                skip_statement();
            }
        }
        if (!cap_seen && !rise_cap_seen && !fall_cap_seen &&
            pin.direction != LibertyPin::Output) {
            lib.warnings.push_back("cell " + cell.name + " pin " + pin_name +
                                   ": missing capacitance, defaulting to 0");
        }
        double rc = rise_cap_seen ? rise_cap : cap;
        double fc = fall_cap_seen ? fall_cap : cap;
        pin.capacitance[ER] = rc;
        pin.capacitance[EF] = fc;
        pin.capacitance[LR] = rc;
        pin.capacitance[LF] = fc;
        if (!pin.is_clock && looks_like_clock_name(pin_name) &&
            pin.direction == LibertyPin::Input)
            pin.is_clock = true;
        cell.pins[pin_name] = pin;
        for (auto& a : arcs) cell.arcs.push_back(std::move(a));
    }

    void parse_timing_body(const std::string& cell_name, const std::string& out_pin,
                           std::vector<TimingArc>& arcs) {
        TimingArc arc;
        arc.output_pin = out_pin;
        while (!accept("}")) {
            Token t = peek();
            if (t.text == "related_pin") {
                next();
                expect(":");
                Token v = next();
                accept(";");
                arc.related_input_pin = v.text;
            } else {
                int kind = -1;
                for (int k = 0; k < 4; ++k)
                    if (t.text == table_kind_name(k)) kind = k;
                if (kind >= 0) {
                    next();
                    auto args = group_args();
                    std::string tmpl = args.empty() ? "" : args[0];
                    expect("{");
                    Lut lut = parse_table_body(cell_name, out_pin, tmpl, t.line);
                    arc.tables[table_slot(kind, false)] = std::move(lut);
                    arc.valid[table_slot(kind, false)] = true;
                } else {
                    skip_statement();
                }
            }
        }
        // related_pin may list several pins
        std::istringstream rp(arc.related_input_pin);
        std::string one;
        while (rp >> one) {
            TimingArc copy = arc;
            copy.related_input_pin = one;
            arcs.push_back(std::move(copy));
        }
    }

    Lut parse_table_body(const std::string& cell_name, const std::string& out_pin,
                         const std::string& tmpl, int line) {
        Lut lut;
        std::vector<std::string> value_rows;
        while (!accept("}")) {
            Token t = peek();
            if (t.text == "index_1" || t.text == "index_2") {
                next();
                auto strs = complex_values();
                std::vector<double> vals;
                for (auto& s : strs)
                    for (double d : parse_number_list(s, t.line)) vals.push_back(d);
                (t.text == "index_1" ? lut.index1 : lut.index2) = std::move(vals);
                accept(";");
            } else if (t.text == "values") {
                next();
                value_rows = complex_values();
                accept(";");
            } else {
                skip_statement();
            }
        }
        if (lut.index1.empty() || lut.index2.empty()) {
            auto it = templates_.find(tmpl);
            if (it != templates_.end()) {
                if (lut.index1.empty()) lut.index1 = it->second.first;
                if (lut.index2.empty()) lut.index2 = it->second.second;
            }
        }
        for (auto& row : value_rows)
            for (double d : parse_number_list(row, line)) lut.values.push_back(d);
        if (lut.index1.empty() && lut.values.size() == 1) lut.index1 = {0.0};
        if (lut.index2.empty() && lut.values.size() == 1) lut.index2 = {0.0};
        if (lut.values.size() != lut.rows() * lut.cols())
            throw ParseError("liberty: table in cell " + cell_name + " arc to " + out_pin +
                                 " has " + std::to_string(lut.values.size()) +
                                 " values, expected " +
                                 std::to_string(lut.rows() * lut.cols()),
                             line);
        return lut;
    }
};

}  // namespace liberty_detail

inline LibertyLibrary parse_liberty(std::string_view text) {
    return liberty_detail::Parser(text).run();
}

// Merge an early- and a late-corner library: early table slots and the
// early/late capacitance pairs come from the respective libraries.
inline std::optional<LibertyCell> merged_cell(const LibrarySet& libs, const std::string& name) {
    auto ei = libs.early.find(name);
    auto li = libs.late.find(name);
    if (ei == libs.early.end() || li == libs.late.end()) return std::nullopt;
    LibertyCell out = ei->second;
    for (auto& [pname, pin] : out.pins) {
        auto lp = li->second.pins.find(pname);
        if (lp != li->second.pins.end()) {
            pin.capacitance[LR] = lp->second.capacitance[LR];
            pin.capacitance[LF] = lp->second.capacitance[LF];
            pin.is_clock = pin.is_clock || lp->second.is_clock;
        }
    }
    for (auto& arc : out.arcs) {
        for (const auto& larc : li->second.arcs) {
            if (larc.related_input_pin != arc.related_input_pin ||
                larc.output_pin != arc.output_pin)
                continue;
            for (int k = 0; k < 4; ++k) {
                if (larc.valid[table_slot(k, false)]) {
                    arc.tables[table_slot(k, true)] = larc.tables[table_slot(k, false)];
                    arc.valid[table_slot(k, true)] = true;
                }
            }
        }
    }
    return out;
}

// Re-serialize the supported subset; used for round-trip checks and by the
// synthetic benchmark generator.
inline std::string emit_liberty(const LibertyLibrary& lib) {
    std::ostringstream os;
    os.precision(17);  // max_digits10, doubles round-trip exactly
    os << "library (" << (lib.name.empty() ? "lib" : lib.name) << ") {\n";
    for (const auto& [cname, cell] : lib.cells) {
        os << "  cell (" << cname << ") {\n";
        for (const auto& [pname, pin] : cell.pins) {
            os << "    pin (" << pname << ") {\n";
            os << "      direction : "
               << (pin.direction == LibertyPin::Input
                       ? "input"
                       : pin.direction == LibertyPin::Output ? "output" : "inout")
               << " ;\n";
            if (pin.capacitance[ER] == pin.capacitance[EF]) {
                os << "      capacitance : " << pin.capacitance[ER] << " ;\n";
            } else {
                os << "      rise_capacitance : " << pin.capacitance[ER] << " ;\n";
                os << "      fall_capacitance : " << pin.capacitance[EF] << " ;\n";
            }
            if (pin.is_clock) os << "      clock : true ;\n";
            for (const auto& arc : cell.arcs) {
                if (arc.output_pin != pname) continue;
                os << "      timing () {\n";
                os << "        related_pin : \"" << arc.related_input_pin << "\" ;\n";
                for (int k = 0; k < 4; ++k) {
                    int slot = table_slot(k, false);
                    if (!arc.valid[slot]) continue;
                    const Lut& lut = arc.tables[slot];
                    os << "        " << table_kind_name(k) << " (t) {\n";
                    auto emit_axis = [&](const char* nm, const std::vector<double>& bp) {
                        os << "          " << nm << " (\"";
                        for (size_t i = 0; i < bp.size(); ++i)
                            os << (i ? ", " : "") << bp[i];
                        os << "\");\n";
                    };
                    emit_axis("index_1", lut.index1);
                    emit_axis("index_2", lut.index2);
                    os << "          values (";
                    for (size_t i = 0; i < lut.rows(); ++i) {
                        os << (i ? ", " : "") << "\"";
                        for (size_t j = 0; j < lut.cols(); ++j)
                            os << (j ? ", " : "") << lut.at(i, j);
                        os << "\"";
                    }
                    os << ");\n";
                    os << "        }\n";
                }
                os << "      }\n";
            }
            os << "    }\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace presta
