#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "presta/generator.hpp"
#include "presta/metrics.hpp"
#include "presta/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

void add_common_options(CLI::App* cmd, presta::RunConfig& cfg, std::string& lut_shape) {
    cmd->add_option("--lib-early", cfg.lib_early, "early-corner Liberty file (repeatable)")
        ->envname("PRESTA_LIB_EARLY");
    cmd->add_option("--lib-late", cfg.lib_late, "late-corner Liberty file (repeatable)")
        ->envname("PRESTA_LIB_LATE");
    cmd->add_option("--def", cfg.def_path, "DEF placement file")->envname("PRESTA_DEF");
    cmd->add_option("--sdc", cfg.sdc_path, "SDC constraints file")->envname("PRESTA_SDC");
    cmd->add_option("--sdf", cfg.sdf_path, "SDF delay/label file")->envname("PRESTA_SDF");
    cmd->add_option("--labels", cfg.labels_path, "label sidecar file")
        ->envname("PRESTA_LABELS");
    cmd->add_option("--at", cfg.at_source, "AT source: labels|external|propagate")
        ->envname("PRESTA_AT");
    cmd->add_option("--predictions", cfg.predictions_path, "external AT prediction file")
        ->envname("PRESTA_PREDICTIONS");
    cmd->add_option("--lut-shape", lut_shape, "target LUT shape RxC (default 7x7)")
        ->envname("PRESTA_LUT_SHAPE");
    cmd->add_option("--net-delay-per-micron", cfg.net_delay_per_micron,
                    "linear pre-routing net delay model, ns per micron (default 0)")
        ->envname("PRESTA_NET_DELAY_PER_MICRON");
    cmd->add_option("--pi-slew", cfg.pi_slew, "default primary input slew, ns")
        ->envname("PRESTA_PI_SLEW");
    cmd->add_option("--jobs", cfg.jobs, "max concurrent file parses (0 = auto)")
        ->envname("PRESTA_JOBS");
    cmd->add_flag("--permissive-labels", [&cfg](int64_t) { cfg.strict_labels = false; },
                  "fill pins missing from labels instead of failing");
    cmd->add_flag("--clock-early-min-rf",
                  [&cfg](int64_t) { cfg.clock_early_min_rf = true; },
                  "use min(ER,EF) for clock-path early AT instead of ER");
    cmd->add_option("--out-graph", cfg.out_graph, "write graph interchange document here")
        ->envname("PRESTA_OUT_GRAPH");
    cmd->add_option("--out-report", cfg.out_report_json,
                    "write the structured slack report here")
        ->envname("PRESTA_OUT_REPORT");
    cmd->add_option("--out-report-text", cfg.out_report_text, "write the text report here");
    cmd->add_flag("--no-fail-on-wns", [&cfg](int64_t) { cfg.fail_on_wns = false; },
                  "exit 0 even when WNS < 0");
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

bool apply_lut_shape(presta::RunConfig& cfg, const std::string& lut_shape) {
    if (lut_shape.empty()) return true;
    auto x = lut_shape.find('x');
    if (x == std::string::npos) return false;
    try {
        cfg.lut_rows = std::stoul(lut_shape.substr(0, x));
        cfg.lut_cols = std::stoul(lut_shape.substr(x + 1));
    } catch (const std::exception&) {
        return false;
    }
    return cfg.lut_rows >= 1 && cfg.lut_cols >= 1;
}

int check_inputs(const presta::RunConfig& cfg, bool need_sdc, bool need_at_source) {
    if (cfg.lib_early.empty()) return usage_error("at least one --lib-early is required");
    if (cfg.lib_late.empty()) return usage_error("at least one --lib-late is required");
    if (cfg.def_path.empty()) return usage_error("--def is required");
    if (need_sdc && cfg.sdc_path.empty()) return usage_error("--sdc is required");
    if (need_at_source) {
        if (cfg.at_source == "labels" && cfg.sdf_path.empty() && cfg.labels_path.empty())
            return usage_error("--at labels requires --sdf or --labels");
        if (cfg.at_source == "external" && cfg.predictions_path.empty())
            return usage_error("--at external requires --predictions");
        if (cfg.at_source != "labels" && cfg.at_source != "external" &&
            cfg.at_source != "propagate")
            return usage_error("--at must be labels, external, or propagate");
    }
    return 0;
}

void write_outputs(const presta::RunConfig& cfg, const presta::PipelineResult& r) {
    if (!cfg.out_graph.empty()) {
        auto doc = presta::export_graph(r.graph, r.labels.empty() ? nullptr : &r.labels);
        presta::write_file(cfg.out_graph, doc.dump(2) + "\n");
    }
    if (!cfg.out_report_json.empty())
        presta::write_file(cfg.out_report_json,
                           presta::report_to_json(r.report).dump(2) + "\n");
    if (!cfg.out_report_text.empty())
        presta::write_file(cfg.out_report_text, presta::generate_text_report(r.report));
}

int cmd_parse(const presta::RunConfig& cfg) {
    if (int rc = check_inputs(cfg, false, false)) return rc;
    auto r = presta::run_pipeline_parse_only(cfg);
    write_outputs(cfg, r);
    std::cout << presta::stats_line(r) << "\n";
    return 0;
}

int cmd_slack(const presta::RunConfig& cfg) {
    if (int rc = check_inputs(cfg, true, true)) return rc;
    auto r = presta::run_pipeline(cfg);
    write_outputs(cfg, r);
    std::cout << presta::generate_text_report(r.report);
    std::cout << presta::stats_line(r) << "\n";
    return (cfg.fail_on_wns && r.report.wns < 0) ? 1 : 0;
}

int cmd_compare(const presta::RunConfig& cfg) {
    if (int rc = check_inputs(cfg, true, true)) return rc;
    if (cfg.sdf_path.empty() && cfg.labels_path.empty())
        return usage_error("compare requires a label source (--sdf or --labels)");
    auto r = presta::run_pipeline(cfg);
    auto summary = presta::evaluate(r.graph, r.report, r.labels, r.timing);
    std::cout << presta::eval_summary_line(summary) << "\n";
    if (!cfg.out_report_json.empty())
        presta::write_file(cfg.out_report_json,
                           presta::eval_summary_to_json(summary).dump(2) + "\n");
    return 0;
}

int cmd_gen(uint64_t seed, const std::string& out_dir, int registers, int combo, int inputs,
            int outputs, int clock_buffers, bool big_luts) {
    presta::GenOptions opt;
    opt.seed = seed;
    opt.n_registers = registers;
    opt.n_combo = combo;
    opt.n_inputs = inputs;
    opt.n_outputs = outputs;
    opt.n_clock_buffers = clock_buffers;
    opt.lut_7x7 = big_luts;
    auto circuit = presta::generate_circuit(opt);

    fs::create_directories(out_dir);
    auto path = [&](const char* f) { return (fs::path(out_dir) / f).string(); };
    presta::write_file(path("early.lib"), presta::emit_liberty(circuit.early_lib));
    presta::write_file(path("late.lib"), presta::emit_liberty(circuit.late_lib));
    presta::write_file(path("design.def"), presta::emit_def(circuit.design));
    presta::write_file(path("design.sdc"), presta::emit_sdc(circuit.sdc));

    // oracle labels: propagator AT/Slew plus estimated endpoint RAT
    auto design = presta::resolve_net_drivers(circuit.design, circuit.libs);
    auto graph = presta::build_graph(design, circuit.libs, opt.lut_7x7 ? 7 : 1,
                                     opt.lut_7x7 ? 7 : 1);
    presta::remove_cycles(graph);
    presta::compute_levels(graph);
    auto timing = presta::propagate_at(graph, circuit.sdc);
    auto report = presta::compute_slack(graph, timing, circuit.sdc);
    presta::DelayLabels labels;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        labels.pin_at[graph.nodes[i].name] = timing.at[i];
        labels.pin_slew[graph.nodes[i].name] = timing.slew[i];
    }
    for (const auto& ep : report.endpoints) {
        if (!ep.constrained) continue;
        presta::FourCorner rat;
        rat[presta::LR] = ep.rat_corrected;
        labels.pin_rat[ep.name] = rat;
    }
    presta::write_file(path("labels.txt"), presta::emit_label_sidecar(labels));
    std::cout << "wrote early.lib late.lib design.def design.sdc labels.txt to " << out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pre-routing slack estimation toolkit"};
    app.require_subcommand(1);

    presta::RunConfig cfg;
    std::string lut_shape;

    auto* parse_cmd = app.add_subcommand("parse", "parse inputs and export the timing graph");
    add_common_options(parse_cmd, cfg, lut_shape);
    auto* slack_cmd = app.add_subcommand("slack", "full pipeline: slack report and TNS/WNS");
    add_common_options(slack_cmd, cfg, lut_shape);
    auto* compare_cmd =
        app.add_subcommand("compare", "evaluate estimated timing against labels");
    add_common_options(compare_cmd, cfg, lut_shape);

    uint64_t seed = 1;
    std::string out_dir = "gen_out";
    int registers = 4, combo = 8, inputs = 2, outputs = 2, clock_buffers = 3;
    bool big_luts = false;
    auto* gen_cmd = app.add_subcommand("gen", "emit a random synthetic benchmark circuit");
    gen_cmd->add_option("--seed", seed, "RNG seed");
    gen_cmd->add_option("--out-dir", out_dir, "output directory");
    gen_cmd->add_option("--registers", registers, "number of flip-flops");
    gen_cmd->add_option("--combo", combo, "number of combinational cells");
    gen_cmd->add_option("--inputs", inputs, "number of data input ports");
    gen_cmd->add_option("--outputs", outputs, "number of output ports");
    gen_cmd->add_option("--clock-buffers", clock_buffers, "clock tree buffer count");
    gen_cmd->add_flag("--lut-7x7", big_luts, "emit 7x7 tables instead of 1x1 constants");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!apply_lut_shape(cfg, lut_shape)) return usage_error("bad --lut-shape, want RxC");
        if (parse_cmd->parsed()) return cmd_parse(cfg);
        if (slack_cmd->parsed()) return cmd_slack(cfg);
        if (compare_cmd->parsed()) return cmd_compare(cfg);
        if (gen_cmd->parsed())
            return cmd_gen(seed, out_dir, registers, combo, inputs, outputs, clock_buffers,
                           big_luts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
