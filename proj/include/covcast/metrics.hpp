#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "covcast/aci.hpp"

namespace covcast::eval {

// Per-step and overall coverage accounting. Infinite-width intervals are
// counted but excluded from the width mean.
class RunMetrics {
  public:
    explicit RunMetrics(int steps);

    void accumulate(int step /*1-based*/, double err, double width);

    int steps() const { return static_cast<int>(trials_.size()); }
    std::int64_t trials(int step) const { return trials_[step - 1]; }
    std::int64_t errors(int step) const { return errors_[step - 1]; }
    std::int64_t infinite(int step) const { return infinite_[step - 1]; }
    bool has_trials() const;

    double error_rate(int step) const;       // errors / trials
    double mean_width(int step) const;       // over finite-width trials only
    double overall_error_rate() const;       // all errors / all trials
    double overall_mean_width() const;

  private:
    std::vector<std::int64_t> trials_;
    std::vector<std::int64_t> errors_;
    std::vector<std::int64_t> infinite_;
    std::vector<double> width_sum_;
};

struct StepBound {
    double target_eps = 0;
    double gamma = 0;
    std::int64_t trials = 0;
    double deviation = 0;  // |mean err - eps|
    double bound = 0;      // (max(eps, 1-eps) + gamma) / (gamma * T)
    bool satisfied = false;
};

struct BoundReport {
    std::vector<StepBound> per_step;
    double overall_deviation = 0;
    double overall_bound = 0;  // mean of per-step bounds
    bool overall_satisfied = false;
    bool advisory = false;  // clamping fired: violations are warnings, not bugs

    std::string render() const;
};

// Finite-sample coverage deviation check; advisory when clamping bound.
BoundReport check_bounds(const RunMetrics& metrics, const aci::AciConfig& cfg,
                         std::size_t clamp_events);

// Summary table, one row per step plus an overall row:
// hour,target_eps,error_rate,avg_length,infinite_count (3 significant figures).
std::string render_summary_csv(const RunMetrics& metrics, const Eigen::VectorXd& eps_target);
std::string render_summary_text(const RunMetrics& metrics, const Eigen::VectorXd& eps_target);

// One trace row per scored (origin, step).
struct TraceRow {
    std::int64_t t = 0;  // origin: time index of the step-1 target
    int step = 0;        // 1-based
    double lower = 0;
    double upper = 0;
    double eps_t = 0;    // significance the interval was built at
    int covered = 0;
    double width = 0;
};

std::string render_trace_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> parse_trace_csv(const std::string& text);

std::string render_clamp_log(const std::vector<aci::ClampEvent>& log);

}  // namespace covcast::eval
