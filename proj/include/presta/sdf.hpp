#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "presta/common.hpp"

namespace presta {

// Labels extracted from SDF plus the per-pin sidecar dump.
struct DelayLabels {
    std::map<std::tuple<std::string, std::string, std::string>, FourCorner>
        cell_delays;  // (instance, in pin, out pin)
    std::map<std::pair<std::string, std::string>, FourCorner>
        net_delays;  // (driver pin, sink pin), full "inst/pin" names
    std::map<std::string, FourCorner> pin_at;
    std::map<std::string, FourCorner> pin_rat;
    std::map<std::string, FourCorner> pin_slew;
    std::vector<std::string> warnings;
    int duplicate_count = 0;

    bool empty() const {
        return cell_delays.empty() && net_delays.empty() && pin_at.empty() &&
               pin_rat.empty() && pin_slew.empty();
    }
};

inline void merge_labels(DelayLabels& into, const DelayLabels& from) {
    for (const auto& [k, v] : from.cell_delays) into.cell_delays[k] = v;
    for (const auto& [k, v] : from.net_delays) into.net_delays[k] = v;
    for (const auto& [k, v] : from.pin_at) into.pin_at[k] = v;
    for (const auto& [k, v] : from.pin_rat) into.pin_rat[k] = v;
    for (const auto& [k, v] : from.pin_slew) into.pin_slew[k] = v;
    into.duplicate_count += from.duplicate_count;
    for (const auto& w : from.warnings) into.warnings.push_back(w);
}

// Sidecar record format: `pin quantity corner value`, one per line,
// quantity in {AT, RAT, SLEW}, corner in {ER, EF, LR, LF}, '#' comments.
inline DelayLabels parse_label_sidecar(std::string_view text) {
    DelayLabels out;
    std::istringstream in{std::string(text)};
    std::string line_str;
    int lineno = 0;
    int bad = 0;
    std::string first_bad;
    std::set<std::string> seen;
    while (std::getline(in, line_str)) {
        ++lineno;
        auto hash = line_str.find('#');
        if (hash != std::string::npos) line_str.erase(hash);
        std::istringstream ls(line_str);
        std::string pin, quantity, corner_s;
        double value;
        if (!(ls >> pin)) continue;  // blank
        if (!(ls >> quantity >> corner_s >> value)) {
            ++bad;
            if (first_bad.empty())
                first_bad = "line " + std::to_string(lineno) + ": '" + line_str + "'";
            continue;
        }
        int corner = corner_from_name(corner_s);
        std::map<std::string, FourCorner>* target = nullptr;
        if (quantity == "AT")
            target = &out.pin_at;
        else if (quantity == "RAT")
            target = &out.pin_rat;
        else if (quantity == "SLEW")
            target = &out.pin_slew;
        if (!target || corner < 0) {
            ++bad;
            if (first_bad.empty())
                first_bad = "line " + std::to_string(lineno) + ": '" + line_str + "'";
            continue;
        }
        // same pin with a new corner is the normal case; only an exact
        // (quantity, pin, corner) repeat counts as a duplicate
        if (!seen.insert(quantity + " " + pin + " " + corner_s).second) {
            ++out.duplicate_count;
            out.warnings.push_back("label sidecar: duplicate record for " + pin + " " +
                                   quantity + " " + corner_s + ", last wins");
        }
        (*target)[pin][corner] = value;
    }
    if (bad > 0)
        throw ParseError("label sidecar: " + std::to_string(bad) +
                         " unrecognized record(s), first at " + first_bad);
    return out;
}

namespace sdf_detail {

struct Lexer {
    std::string_view src;
    size_t pos = 0;
    int line = 1;

    std::string next() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '\n') {
                ++line;
                ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        if (pos >= src.size()) return "";
        char c = src[pos];
        if (c == '(' || c == ')') {
            ++pos;
            return std::string(1, c);
        }
        if (c == '"') {
            size_t start = ++pos;
            while (pos < src.size() && src[pos] != '"') ++pos;
            std::string s(src.substr(start, pos - start));
            if (pos < src.size()) ++pos;
            return s;
        }
        size_t start = pos;
        while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
               src[pos] != '(' && src[pos] != ')')
            ++pos;
        if (src[pos - 1] == '\r') return std::string(src.substr(start, pos - start - 1));
        return std::string(src.substr(start, pos - start));
    }

    std::string peek() {
        size_t p = pos;
        int l = line;
        std::string t = next();
        pos = p;
        line = l;
        return t;
    }
};

// rvalue: "(v)", "(min:typ:max)", or "()" for absent.
struct RValue {
    double min = 0, max = 0;
    bool present = false;
};

inline RValue parse_rvalue(Lexer& lx) {
    std::string t = lx.next();
    if (t != "(") throw ParseError("sdf: expected '(' in delay value", lx.line);
    RValue rv;
    std::string body;
    while (true) {
        t = lx.next();
        if (t == ")") break;
        if (t.empty()) throw ParseError("sdf: truncated delay value", lx.line);
        body += t;
    }
    if (body.empty()) return rv;
    rv.present = true;
    auto c1 = body.find(':');
    try {
        if (c1 == std::string::npos) {
            rv.min = rv.max = std::stod(body);
        } else {
            auto c2 = body.find(':', c1 + 1);
            if (c2 == std::string::npos)
                throw ParseError("sdf: malformed triplet '" + body + "'", lx.line);
            std::string smin = body.substr(0, c1);
            std::string smax = body.substr(c2 + 1);
            if (smin.empty() && smax.empty())
                throw ParseError("sdf: malformed triplet '" + body + "'", lx.line);
            if (smin.empty()) smin = smax;
            if (smax.empty()) smax = smin;
            rv.min = std::stod(smin);
            rv.max = std::stod(smax);
        }
    } catch (const std::invalid_argument&) {
        throw ParseError("sdf: malformed delay value '" + body + "'", lx.line);
    }
    return rv;
}

inline void skip_sexpr(Lexer& lx) {
    // called after '(' and keyword have been consumed
    int depth = 1;
    while (depth > 0) {
        std::string t = lx.next();
        if (t.empty()) throw ParseError("sdf: unbalanced parentheses", lx.line);
        if (t == "(") ++depth;
        if (t == ")") --depth;
    }
}

inline double timescale_to_ns(const std::string& num, const std::string& unit, int line) {
    double mult = std::stod(num);
    if (unit == "s") return mult * 1e9;
    if (unit == "ms") return mult * 1e6;
    if (unit == "us") return mult * 1e3;
    if (unit == "ns") return mult;
    if (unit == "ps") return mult * 1e-3;
    if (unit == "fs") return mult * 1e-6;
    throw ParseError("sdf: unknown TIMESCALE unit '" + unit + "'", line);
}

}  // namespace sdf_detail

// Parse the SDF 3.0 subset (DELAYFILE / TIMESCALE / CELL / DELAY / ABSOLUTE
// with IOPATH and INTERCONNECT). Values are normalized to nanoseconds.
// `// LABEL pin quantity corner value` comment lines are accepted inline so
// one annotated file can carry both delays and labels.
inline DelayLabels parse_sdf(std::string_view text) {
    DelayLabels out;

    // harvest inline label lines first; the lexer drops // comments
    {
        std::istringstream in{std::string(text)};
        std::string line_str;
        std::string sidecar;
        while (std::getline(in, line_str)) {
            size_t p = line_str.find_first_not_of(" \t");
            if (p == std::string::npos) continue;
            if (line_str.compare(p, 8, "// LABEL") == 0)
                sidecar += line_str.substr(p + 8) + "\n";
        }
        if (!sidecar.empty()) merge_labels(out, parse_label_sidecar(sidecar));
    }

    sdf_detail::Lexer lx(text);
    double scale = 1.0;  // ns per SDF unit
    std::string current_instance;

    auto store = [&](auto& map, const auto& key, const FourCorner& val,
                     const std::string& what) {
        for (int c = 0; c < 4; ++c)
            if (val[c] < 0.0)
                throw ParseError("sdf: negative delay for " + what, lx.line);
        if (val[ER] > val[LR] || val[EF] > val[LF])
            throw ParseError("sdf: early > late delay for " + what, lx.line);
        auto [it, inserted] = map.try_emplace(key, val);
        if (!inserted) {
            it->second = val;
            ++out.duplicate_count;
            out.warnings.push_back("sdf: duplicate arc " + what + ", last wins");
        }
    };

    std::string t = lx.next();
    if (t != "(") throw ParseError("sdf: expected '(DELAYFILE'", lx.line);
    t = lx.next();
    if (t != "DELAYFILE") throw ParseError("sdf: expected DELAYFILE, got '" + t + "'", lx.line);

    int depth = 1;
    while (depth > 0) {
        t = lx.next();
        if (t.empty()) throw ParseError("sdf: unbalanced parentheses", lx.line);
        if (t == ")") {
            --depth;
            continue;
        }
        if (t != "(") continue;
        std::string kw = lx.next();
        if (kw == "TIMESCALE") {
            std::string a = lx.next();
            std::string b = lx.peek();
            if (b != ")" && b != "(") {
                lx.next();
                scale = sdf_detail::timescale_to_ns(a, b, lx.line);
            } else {
                // unit glued to the number, e.g. "1ps"
                size_t i = 0;
                while (i < a.size() &&
                       (std::isdigit(static_cast<unsigned char>(a[i])) || a[i] == '.'))
                    ++i;
                scale = sdf_detail::timescale_to_ns(a.substr(0, i), a.substr(i), lx.line);
            }
            std::string close = lx.next();
            if (close != ")") throw ParseError("sdf: malformed TIMESCALE", lx.line);
        } else if (kw == "CELL") {
            current_instance.clear();
            ++depth;
        } else if (kw == "INSTANCE") {
            std::string inst = lx.next();
            if (inst == ")") {
                current_instance.clear();
            } else {
                current_instance = inst;
                if (lx.next() != ")") throw ParseError("sdf: malformed INSTANCE", lx.line);
            }
        } else if (kw == "DELAY" || kw == "ABSOLUTE") {
            ++depth;
        } else if (kw == "INCREMENT") {
            throw ParseError("sdf: INCREMENT delay blocks are not supported (ABSOLUTE only)",
                             lx.line);
        } else if (kw == "IOPATH") {
            std::string in_pin = lx.next();
            std::string out_pin = lx.next();
            auto rise = sdf_detail::parse_rvalue(lx);
            sdf_detail::RValue fall = rise;
            if (lx.peek() == "(") fall = sdf_detail::parse_rvalue(lx);
            while (lx.peek() == "(") sdf_detail::parse_rvalue(lx);  // extra transitions
            if (lx.next() != ")") throw ParseError("sdf: malformed IOPATH", lx.line);
            FourCorner d;
            d[ER] = rise.min * scale;
            d[LR] = rise.max * scale;
            d[EF] = fall.min * scale;
            d[LF] = fall.max * scale;
            store(out.cell_delays, std::make_tuple(current_instance, in_pin, out_pin), d,
                  current_instance + "/" + in_pin + "->" + out_pin);
        } else if (kw == "INTERCONNECT") {
            std::string src = lx.next();
            std::string dst = lx.next();
            auto rise = sdf_detail::parse_rvalue(lx);
            sdf_detail::RValue fall = rise;
            if (lx.peek() == "(") fall = sdf_detail::parse_rvalue(lx);
            while (lx.peek() == "(") sdf_detail::parse_rvalue(lx);
            if (lx.next() != ")") throw ParseError("sdf: malformed INTERCONNECT", lx.line);
            FourCorner d;
            d[ER] = rise.min * scale;
            d[LR] = rise.max * scale;
            d[EF] = fall.min * scale;
            d[LF] = fall.max * scale;
            store(out.net_delays, std::make_pair(src, dst), d, src + "->" + dst);
        } else if (kw == "CELLTYPE" || kw == "SDFVERSION" || kw == "DESIGN" || kw == "DATE" ||
                   kw == "VENDOR" || kw == "PROGRAM" || kw == "VERSION" || kw == "DIVIDER" ||
                   kw == "VOLTAGE" || kw == "PROCESS" || kw == "TEMPERATURE") {
            sdf_detail::skip_sexpr(lx);
        } else {
            sdf_detail::skip_sexpr(lx);
        }
    }
    return out;
}

// Re-serialize the supported subset (delays in ns, no TIMESCALE needed).
inline std::string emit_sdf(const DelayLabels& labels, const std::string& design = "top") {
    std::ostringstream os;
    os.precision(17);  // max_digits10, doubles round-trip exactly
    os << "(DELAYFILE\n  (SDFVERSION \"3.0\")\n  (DESIGN \"" << design
       << "\")\n  (TIMESCALE 1ns)\n";
    // group cell delays by instance
    std::map<std::string, std::vector<std::tuple<std::string, std::string, FourCorner>>>
        by_inst;
    for (const auto& [k, v] : labels.cell_delays)
        by_inst[std::get<0>(k)].push_back({std::get<1>(k), std::get<2>(k), v});
    for (const auto& [inst, arcs] : by_inst) {
        os << "  (CELL (CELLTYPE \"-\") (INSTANCE " << inst << ")\n    (DELAY (ABSOLUTE\n";
        for (const auto& [in_pin, out_pin, d] : arcs) {
            os << "      (IOPATH " << in_pin << " " << out_pin << " (" << d[ER] << "::"
               << d[LR] << ") (" << d[EF] << "::" << d[LF] << "))\n";
        }
        os << "    ))\n  )\n";
    }
    if (!labels.net_delays.empty()) {
        os << "  (CELL (CELLTYPE \"-\") (INSTANCE)\n    (DELAY (ABSOLUTE\n";
        for (const auto& [k, d] : labels.net_delays) {
            os << "      (INTERCONNECT " << k.first << " " << k.second << " (" << d[ER]
               << "::" << d[LR] << ") (" << d[EF] << "::" << d[LF] << "))\n";
        }
        os << "    ))\n  )\n";
    }
    auto emit_labels = [&](const char* q, const std::map<std::string, FourCorner>& m) {
        for (const auto& [pin, v] : m)
            for (int c = 0; c < 4; ++c)
                os << "// LABEL " << pin << " " << q << " " << corner_name(c) << " " << v[c]
                   << "\n";
    };
    emit_labels("AT", labels.pin_at);
    emit_labels("RAT", labels.pin_rat);
    emit_labels("SLEW", labels.pin_slew);
    os << ")\n";
    return os.str();
}

// Sidecar serialization for label/prediction files.
inline std::string emit_label_sidecar(const DelayLabels& labels) {
    std::ostringstream os;
    os.precision(17);  // max_digits10, doubles round-trip exactly
    auto emit = [&](const char* q, const std::map<std::string, FourCorner>& m) {
        for (const auto& [pin, v] : m)
            for (int c = 0; c < 4; ++c)
                os << pin << " " << q << " " << corner_name(c) << " " << v[c] << "\n";
    };
    emit("AT", labels.pin_at);
    emit("RAT", labels.pin_rat);
    emit("SLEW", labels.pin_slew);
    return os.str();
}

}  // namespace presta
