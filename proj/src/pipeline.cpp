#include "covcast/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "covcast/errors.hpp"
#include "covcast/generators.hpp"

namespace covcast::pipeline {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path.string());
    out << content;
}

}  // namespace

RunResult run_over_frame(const ts::SeriesFrame& frame, const cfg::ExperimentConfig& config) {
    config.validate();
    const auto pairs = ts::make_windows(frame, config.window);
    const std::int64_t n_pairs = static_cast<std::int64_t>(pairs.size());
    const std::int64_t train = config.train_pairs;
    const int h = config.window.horizon;
    const int p_lags = config.window.p_lags;
    if (train >= n_pairs)
        throw DataError("train_pairs = " + std::to_string(train) + " leaves no test pairs (of " +
                        std::to_string(n_pairs) + ")");

    // Pairs whose full label precedes the first test prediction: the pair at
    // index t has its last label component at raw time t + p_lags + h - 1,
    // which must be before the first predicted time train + p_lags.
    const std::int64_t initial_absorbed = train - (h - 1);

    double a = 0;
    bool tuned = false;
    if (config.ridge_a) {
        a = *config.ridge_a;
    } else {
        const ridge::GcvGrid grid =
            config.gcv_grid ? *config.gcv_grid : ridge::GcvGrid::log_spaced(1e-4, 1e4, 25);
        const std::vector<ts::SupervisedPair> tune_set(pairs.begin(),
                                                       pairs.begin() + initial_absorbed);
        a = ridge::gcv_tune(tune_set, grid).a;
        tuned = true;
    }

    ridge::RidgeState reg(a, config.window.object_dim(), h);
    for (std::int64_t t = 0; t < initial_absorbed; ++t) reg.absorb(pairs[t]);
    std::int64_t next_absorb = initial_absorbed;

    aci::AciState controller(config.aci);
    aci::PendingBuffer pending(h);

    RunResult res{eval::RunMetrics(h), {}, {}, {}, {}, {}, {}, 0, false, train,
                  n_pairs - train, initial_absorbed};
    res.eps_target = config.aci.eps_target;
    res.gamma = config.aci.gamma;
    res.ridge_a = a;
    res.ridge_a_tuned = tuned;

    const std::int64_t series_len = static_cast<std::int64_t>(frame.size());
    const std::int64_t first_tick = train + p_lags;  // first predicted time index
    for (std::int64_t tick = first_tick; tick < series_len; ++tick) {
        const std::int64_t t_pair = tick - p_lags;
        const bool predicting = t_pair < n_pairs;
        if (predicting) {
            const auto view = reg.peek_with_test(pairs[t_pair].x);
            auto comps = crr::compute_components(view);
            comps.origin = tick;
            pending.record(crr::predict_intervals(comps, controller.significance()));
        }

        // The value at `tick` becomes observable: score every pending step
        // whose target this is. After the final prediction the loop keeps
        // draining the remaining diagonals (no step-1 entry then).
        const double y_true = frame.demand[tick];
        const auto errs = pending.extract_errors(tick, y_true, /*require_head=*/predicting);
        for (int i = 1; i <= h; ++i) {
            if (!errs.err[i - 1].has_value()) continue;
            const double err = *errs.err[i - 1];
            const crr::IntervalVector* iv = pending.find(tick - i + 1);
            eval::TraceRow row;
            row.t = iv->origin;
            row.step = i;
            row.lower = iv->lower[i - 1];
            row.upper = iv->upper[i - 1];
            row.eps_t = iv->eps[i - 1];
            row.covered = err == 0.0 ? 1 : 0;
            row.width = iv->width(i - 1);
            res.trace.push_back(row);
            res.metrics.accumulate(i, err, row.width);
        }

        // Absorb every pair whose label is now fully observed.
        if (!config.freeze_after_training) {
            const std::int64_t completed = tick - (p_lags + h - 1);
            while (next_absorb <= completed && next_absorb < n_pairs) {
                reg.absorb(pairs[next_absorb]);
                ++next_absorb;
            }
        }

        const std::optional<double> floor_now =
            config.aci.clamp_floor_auto
                ? std::optional<double>(2.0 / static_cast<double>(reg.n_train() + 1))
                : std::nullopt;
        controller.update(config.aci, errs, floor_now);
    }

    res.clamp_log = controller.clamp_log();
    res.eps_final = controller.significance();
    res.bounds = eval::check_bounds(res.metrics, config.aci, res.clamp_log.size());
    return res;
}

RunResult run_dataset(const cfg::ExperimentConfig& config) {
    if (config.dataset.empty()) throw ConfigError("run mode requires a dataset path");
    const auto frame = ts::load_csv(config.dataset, config.schema);
    return run_over_frame(frame, config);
}

RunResult run_synthetic(const cfg::ExperimentConfig& config) {
    const auto frame = ts::frame_from_values(gen::generate(config.generator));
    return run_over_frame(frame, config);
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "trace.csv", eval::render_trace_csv(result.trace));
    write_file(fs::path(out_dir) / "summary.csv",
               eval::render_summary_csv(result.metrics, result.eps_target));
    write_file(fs::path(out_dir) / "summary.txt",
               eval::render_summary_text(result.metrics, result.eps_target));
    write_file(fs::path(out_dir) / "bound_report.txt", result.bounds.render());
    write_file(fs::path(out_dir) / "clamp_log.csv", eval::render_clamp_log(result.clamp_log));
}

eval::BoundReport check_trace(const std::vector<eval::TraceRow>& rows) {
    if (rows.empty()) throw DataError("trace has no rows");
    int h = 0;
    for (const auto& r : rows) h = std::max(h, r.step);

    // Per step, rows by origin; file order is scoring order, so the first
    // row of a step carries the initial (target) significance level.
    std::vector<std::map<std::int64_t, const eval::TraceRow*>> by_origin(h);
    Eigen::VectorXd eps_target(h);
    std::vector<bool> have_target(h, false);
    for (const auto& r : rows) {
        if (r.step < 1 || r.step > h) throw DataError("trace: step out of range");
        by_origin[r.step - 1].emplace(r.t, &r);
        if (!have_target[r.step - 1]) {
            eps_target[r.step - 1] = r.eps_t;
            have_target[r.step - 1] = true;
        }
    }

    // gamma recovery: consecutive origins o, o+1 of step i differ by one
    // controller tick, whose step-i error came from the row at origin o-i+1:
    //   eps(o+1) - eps(o) = gamma_i * (eps_i - err(o-i+1)).
    Eigen::VectorXd gamma(h);
    for (int i = 1; i <= h; ++i) {
        gamma[i - 1] = std::numeric_limits<double>::quiet_NaN();
        const auto& m = by_origin[i - 1];
        for (auto it = m.begin(); it != m.end(); ++it) {
            auto nx = std::next(it);
            if (nx == m.end()) break;
            if (nx->first != it->first + 1) continue;
            const double delta = nx->second->eps_t - it->second->eps_t;
            if (delta == 0.0) continue;
            const auto src = m.find(nx->first - i);  // origin (o+1) - i = o - i + 1
            if (src == m.end()) continue;
            const double err = src->second->covered ? 0.0 : 1.0;
            const double denom = eps_target[i - 1] - err;
            if (denom == 0.0) continue;
            gamma[i - 1] = delta / denom;
            break;
        }
        if (!(gamma[i - 1] > 0))
            throw DataError("cannot recover a positive learning rate for step " +
                            std::to_string(i) + " from the trace (no update visible)");
    }

    eval::RunMetrics metrics(h);
    for (const auto& r : rows)
        metrics.accumulate(r.step, r.covered ? 0.0 : 1.0, r.width);

    aci::AciConfig cfg;
    cfg.eps_target = eps_target;
    cfg.gamma = gamma;
    return eval::check_bounds(metrics, cfg, /*clamp_events=*/0);
}

}  // namespace covcast::pipeline
