#pragma once

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "presta/common.hpp"

namespace presta {

struct SdcConstraints {
    double clock_period = 0.0;       // T, ns
    std::string clock_name;
    std::string clock_port;
    double clock_uncertainty = 0.0;  // mu, ns
    std::map<std::string, double> output_delays;  // per PO port, ns
    std::map<std::string, double> input_delays;   // per PI port, ns
    double all_outputs_delay = -1.0;  // [all_outputs] form, <0 = unset
    double all_inputs_delay = -1.0;
    std::vector<std::string> ignored_commands;

    double output_delay(const std::string& port) const {
        auto it = output_delays.find(port);
        if (it != output_delays.end()) return it->second;
        return all_outputs_delay >= 0 ? all_outputs_delay : 0.0;
    }
    double input_delay(const std::string& port) const {
        auto it = input_delays.find(port);
        if (it != input_delays.end()) return it->second;
        return all_inputs_delay >= 0 ? all_inputs_delay : 0.0;
    }
};

namespace sdc_detail {

// split one SDC command line into words, keeping [...] queries whole
inline std::vector<std::string> split_command(const std::string& line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '[') {
            int depth = 1;
            size_t start = i++;
            while (i < line.size() && depth > 0) {
                if (line[i] == '[') ++depth;
                if (line[i] == ']') --depth;
                ++i;
            }
            out.push_back(line.substr(start, i - start));
        } else if (c == '{') {
            size_t start = ++i;
            while (i < line.size() && line[i] != '}') ++i;
            out.push_back(line.substr(start, i - start));
            if (i < line.size()) ++i;
        } else {
            size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
                   line[i] != '[')
                ++i;
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

// "[get_ports X]" -> ("get_ports", "X"); "[all_outputs]" -> ("all_outputs","")
inline std::pair<std::string, std::string> parse_query(const std::string& tok) {
    if (tok.size() < 2 || tok.front() != '[' || tok.back() != ']') return {"", tok};
    std::istringstream is(tok.substr(1, tok.size() - 2));
    std::string fn, arg;
    is >> fn;
    std::getline(is, arg);
    size_t p = arg.find_first_not_of(" \t{");
    if (p != std::string::npos) {
        size_t q = arg.find_last_not_of(" \t}");
        arg = arg.substr(p, q - p + 1);
    } else {
        arg.clear();
    }
    return {fn, arg};
}

}  // namespace sdc_detail

// SDC subset: create_clock, set_clock_uncertainty, set_output_delay,
// set_input_delay. Single clock only; anything else lands on the
// ignored-command list. No general Tcl evaluation.
inline SdcConstraints parse_sdc(std::string_view text) {
    SdcConstraints sdc;
    bool clock_seen = false;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto words = sdc_detail::split_command(line);
        if (words.empty()) continue;
        const std::string& cmd = words[0];

        if (cmd == "create_clock") {
            if (clock_seen)
                throw ParseError("sdc: duplicate create_clock (multi-clock unsupported)",
                                 lineno);
            clock_seen = true;
            for (size_t i = 1; i < words.size(); ++i) {
                if (words[i] == "-period" && i + 1 < words.size()) {
                    sdc.clock_period = std::stod(words[++i]);
                } else if (words[i] == "-name" && i + 1 < words.size()) {
                    sdc.clock_name = words[++i];
                } else if (words[i] == "-waveform" && i + 1 < words.size()) {
                    ++i;
                } else if (words[i][0] == '[') {
                    auto [fn, arg] = sdc_detail::parse_query(words[i]);
                    if (fn == "get_ports") sdc.clock_port = arg;
                } else if (words[i][0] != '-') {
                    if (sdc.clock_port.empty()) sdc.clock_port = words[i];
                }
            }
            if (sdc.clock_period <= 0)
                throw ParseError("sdc: create_clock needs a positive -period", lineno);
            if (sdc.clock_name.empty()) sdc.clock_name = sdc.clock_port;
        } else if (cmd == "set_clock_uncertainty") {
            for (size_t i = 1; i < words.size(); ++i) {
                if (words[i][0] != '-' && words[i][0] != '[') {
                    sdc.clock_uncertainty = std::stod(words[i]);
                    break;
                }
            }
        } else if (cmd == "set_output_delay" || cmd == "set_input_delay") {
            bool is_output = (cmd == "set_output_delay");
            double value = 0;
            bool have_value = false, is_min = false;
            std::string port;
            bool all_ports = false;
            for (size_t i = 1; i < words.size(); ++i) {
                if (words[i] == "-max") {
                    continue;
                } else if (words[i] == "-min") {
                    is_min = true;
                } else if (words[i] == "-clock" && i + 1 < words.size()) {
                    ++i;
                } else if (words[i][0] == '[') {
                    auto [fn, arg] = sdc_detail::parse_query(words[i]);
                    if (fn == "get_ports")
                        port = arg;
                    else if (fn == "all_outputs" || fn == "all_inputs")
                        all_ports = true;
                } else if (!have_value && words[i][0] != '-') {
                    value = std::stod(words[i]);
                    have_value = true;
                }
            }
            if (is_min || !have_value) continue;  // late analysis uses -max
            if (all_ports) {
                (is_output ? sdc.all_outputs_delay : sdc.all_inputs_delay) = value;
            } else if (!port.empty()) {
                // [get_ports {a b c}] may carry several names
                std::istringstream ps(port);
                std::string one;
                while (ps >> one)
                    (is_output ? sdc.output_delays : sdc.input_delays)[one] = value;
            }
        } else {
            sdc.ignored_commands.push_back(cmd);
        }
    }
    if (!clock_seen) throw ParseError("sdc: no create_clock command found");
    if (sdc.clock_uncertainty < 0) throw ParseError("sdc: negative clock uncertainty");
    return sdc;
}

inline std::string emit_sdc(const SdcConstraints& sdc) {
    std::ostringstream os;
    os.precision(17);  // max_digits10, doubles round-trip exactly
    os << "create_clock -name " << (sdc.clock_name.empty() ? "clk" : sdc.clock_name)
       << " -period " << sdc.clock_period << " [get_ports " << sdc.clock_port << "]\n";
    if (sdc.clock_uncertainty > 0)
        os << "set_clock_uncertainty " << sdc.clock_uncertainty << " [get_clocks "
           << (sdc.clock_name.empty() ? "clk" : sdc.clock_name) << "]\n";
    for (const auto& [port, v] : sdc.output_delays)
        os << "set_output_delay -max " << v << " [get_ports " << port << "]\n";
    for (const auto& [port, v] : sdc.input_delays)
        os << "set_input_delay -max " << v << " [get_ports " << port << "]\n";
    if (sdc.all_outputs_delay >= 0)
        os << "set_output_delay -max " << sdc.all_outputs_delay << " [all_outputs]\n";
    if (sdc.all_inputs_delay >= 0)
        os << "set_input_delay -max " << sdc.all_inputs_delay << " [all_inputs]\n";
    return os.str();
}

}  // namespace presta
