#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "presta/common.hpp"
#include "presta/sdf.hpp"
#include "presta/slack_engine.hpp"
#include "presta/timing_graph.hpp"

namespace presta {

struct EvalSummary {
    double at_r2 = 0.0;
    double rat_mae = 0.0;
    double slack_mae = 0.0;
    double tns_delta = 0.0;
    double wns_delta = 0.0;
    size_t n_pins = 0;
    size_t n_endpoints = 0;
    size_t endpoints_missing_rat = 0;
};

// R2 = 1 - MSE / population variance of truth.
inline double r2_score(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size() || truth.empty())
        throw ArgError("r2_score: arrays must have equal nonzero length");
    double mean = 0;
    for (double v : truth) mean += v;
    mean /= static_cast<double>(truth.size());
    double var = 0, mse = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        var += (truth[i] - mean) * (truth[i] - mean);
        mse += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    }
    var /= static_cast<double>(truth.size());
    mse /= static_cast<double>(truth.size());
    if (var == 0.0)
        throw ArgError("r2_score: truth has zero variance; R2 is undefined");
    return 1.0 - mse / var;
}

inline double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size() || truth.empty())
        throw ArgError("mae: arrays must have equal nonzero length");
    double s = 0;
    for (size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

// Compare estimated timing against label ground truth, late-rise corner:
// AT R2 over all labeled pins, RAT and slack MAE over labeled endpoints,
// TNS/WNS deltas against label-derived values.
inline EvalSummary evaluate(const TimingGraph& graph, const SlackReport& estimated,
                            const DelayLabels& labels, const PinTiming& timing) {
    EvalSummary s;

    std::vector<double> at_pred, at_truth;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        auto it = labels.pin_at.find(graph.nodes[i].name);
        if (it == labels.pin_at.end()) continue;
        at_pred.push_back(timing.at[i][LR]);
        at_truth.push_back(it->second[LR]);
    }
    s.n_pins = at_truth.size();
    s.at_r2 = at_truth.empty() ? 0.0 : r2_score(at_pred, at_truth);

    std::vector<double> rat_pred, rat_truth, slack_pred, slack_truth;
    double label_tns = 0, label_wns = 0;
    for (const auto& ep : estimated.endpoints) {
        if (!ep.constrained) continue;
        auto it = labels.pin_rat.find(ep.name);
        if (it == labels.pin_rat.end()) {
            ++s.endpoints_missing_rat;
            continue;
        }
        double truth_rat = it->second[LR];
        rat_pred.push_back(ep.rat_corrected);
        rat_truth.push_back(truth_rat);
        auto at_it = labels.pin_at.find(ep.name);
        double truth_at = at_it != labels.pin_at.end() ? at_it->second[LR] : ep.at;
        double truth_slack = truth_rat - truth_at;
        slack_pred.push_back(ep.slack_corrected);
        slack_truth.push_back(truth_slack);
        if (truth_slack < 0) {
            label_tns += truth_slack;
            label_wns = std::min(label_wns, truth_slack);
        }
    }
    s.n_endpoints = rat_truth.size();
    s.rat_mae = rat_truth.empty() ? 0.0 : mae(rat_pred, rat_truth);
    s.slack_mae = slack_truth.empty() ? 0.0 : mae(slack_pred, slack_truth);
    s.tns_delta = estimated.tns - label_tns;
    s.wns_delta = estimated.wns - label_wns;
    return s;
}

inline std::string eval_summary_line(const EvalSummary& s) {
    std::ostringstream os;
    os.precision(6);
    os << "at_r2=" << s.at_r2 << " rat_mae=" << s.rat_mae << " slack_mae=" << s.slack_mae
       << " tns_delta=" << s.tns_delta << " wns_delta=" << s.wns_delta
       << " n_pins=" << s.n_pins << " n_endpoints=" << s.n_endpoints
       << " endpoints_missing_rat=" << s.endpoints_missing_rat;
    return os.str();
}

inline nlohmann::json eval_summary_to_json(const EvalSummary& s) {
    return {{"schema", "presta-eval-summary"},
            {"version", 1},
            {"at_r2", s.at_r2},
            {"rat_mae", s.rat_mae},
            {"slack_mae", s.slack_mae},
            {"tns_delta", s.tns_delta},
            {"wns_delta", s.wns_delta},
            {"n_pins", s.n_pins},
            {"n_endpoints", s.n_endpoints},
            {"endpoints_missing_rat", s.endpoints_missing_rat}};
}

}  // namespace presta
