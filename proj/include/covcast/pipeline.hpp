#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covcast/config.hpp"
#include "covcast/metrics.hpp"

namespace covcast::pipeline {

// Everything one experiment produces, kept in memory so tests can assert on
// it directly; write_outputs() persists the file set the CLI documents.
struct RunResult {
    eval::RunMetrics metrics;
    std::vector<eval::TraceRow> trace;
    std::vector<aci::ClampEvent> clamp_log;
    eval::BoundReport bounds;
    Eigen::VectorXd eps_final;        // controller state after the last update
    Eigen::VectorXd eps_target;
    Eigen::VectorXd gamma;
    double ridge_a = 0;               // fixed or tuned value actually used
    bool ridge_a_tuned = false;
    std::int64_t train_pairs = 0;
    std::int64_t test_pairs = 0;
    std::int64_t initial_absorbed = 0;  // pairs complete before the first prediction
};

// The online protocol over a prepared frame: tune (optional), absorb the
// complete training prefix, then tick through the series interleaving
// predict / observe / absorb / update.
RunResult run_over_frame(const ts::SeriesFrame& frame, const cfg::ExperimentConfig& config);

// run subcommand: load CSV per config, then run_over_frame.
RunResult run_dataset(const cfg::ExperimentConfig& config);

// synth subcommand: generate a series per config, then run_over_frame
// (exogenous features do not apply to synthetic series).
RunResult run_synthetic(const cfg::ExperimentConfig& config);

// Writes trace.csv, summary.csv, summary.txt, bound_report.txt, clamp_log.csv.
void write_outputs(const RunResult& result, const std::string& out_dir);

// Bound report recovered from a trace alone (check subcommand): per-step
// targets are read off the warm-up rows, gamma off the first update delta.
eval::BoundReport check_trace(const std::vector<eval::TraceRow>& rows);

}  // namespace covcast::pipeline
