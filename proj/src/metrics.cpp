#include "covcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "covcast/errors.hpp"

namespace covcast::eval {

namespace {

std::string fmt_full(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_sig3(double v) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double parse_num(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("trace: bad numeric field '" + s + "'");
    }
}

std::int64_t parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("trace: bad integer field '" + s + "'");
    }
}

}  // namespace

RunMetrics::RunMetrics(int steps) {
    if (steps < 1) throw ConfigError("metrics need at least one step");
    trials_.assign(steps, 0);
    errors_.assign(steps, 0);
    infinite_.assign(steps, 0);
    width_sum_.assign(steps, 0.0);
}

void RunMetrics::accumulate(int step, double err, double width) {
    if (step < 1 || step > steps()) throw ConfigError("accumulate: step out of range");
    if (err != 0.0 && err != 1.0) throw ConfigError("accumulate: err must be 0 or 1");
    const int i = step - 1;
    ++trials_[i];
    errors_[i] += static_cast<std::int64_t>(err);
    if (std::isinf(width))
        ++infinite_[i];
    else
        width_sum_[i] += width;
}

bool RunMetrics::has_trials() const {
    return std::any_of(trials_.begin(), trials_.end(), [](std::int64_t t) { return t > 0; });
}

double RunMetrics::error_rate(int step) const {
    const int i = step - 1;
    if (trials_[i] == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(errors_[i]) / static_cast<double>(trials_[i]);
}

double RunMetrics::mean_width(int step) const {
    const int i = step - 1;
    const std::int64_t finite = trials_[i] - infinite_[i];
    if (finite == 0) return std::numeric_limits<double>::quiet_NaN();
    return width_sum_[i] / static_cast<double>(finite);
}

double RunMetrics::overall_error_rate() const {
    std::int64_t t = 0, e = 0;
    for (int i = 0; i < steps(); ++i) {
        t += trials_[i];
        e += errors_[i];
    }
    if (t == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(e) / static_cast<double>(t);
}

double RunMetrics::overall_mean_width() const {
    std::int64_t finite = 0;
    double sum = 0;
    for (int i = 0; i < steps(); ++i) {
        finite += trials_[i] - infinite_[i];
        sum += width_sum_[i];
    }
    if (finite == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / static_cast<double>(finite);
}

BoundReport check_bounds(const RunMetrics& metrics, const aci::AciConfig& cfg,
                         std::size_t clamp_events) {
    if (cfg.steps() != metrics.steps())
        throw ConfigError("bound check: config width does not match metrics");
    BoundReport rep;
    rep.advisory = clamp_events > 0;
    double dev_sum = 0, bound_sum = 0;
    for (int i = 1; i <= metrics.steps(); ++i) {
        StepBound sb;
        sb.target_eps = cfg.eps_target[i - 1];
        sb.gamma = cfg.gamma[i - 1];
        sb.trials = metrics.trials(i);
        if (sb.trials > 0) {
            sb.deviation = std::abs(metrics.error_rate(i) - sb.target_eps);
            sb.bound = (std::max(sb.target_eps, 1.0 - sb.target_eps) + sb.gamma) /
                       (sb.gamma * static_cast<double>(sb.trials));
            sb.satisfied = sb.deviation <= sb.bound;
        } else {
            sb.deviation = std::numeric_limits<double>::quiet_NaN();
            sb.bound = std::numeric_limits<double>::infinity();
            sb.satisfied = true;
        }
        dev_sum += sb.trials > 0 ? sb.deviation : 0.0;
        bound_sum += sb.trials > 0 ? sb.bound : 0.0;
        rep.per_step.push_back(sb);
    }
    const double n = static_cast<double>(metrics.steps());
    rep.overall_deviation = dev_sum / n;
    rep.overall_bound = bound_sum / n;
    rep.overall_satisfied = rep.overall_deviation <= rep.overall_bound;
    return rep;
}

std::string BoundReport::render() const {
    std::ostringstream out;
    out << "coverage deviation bounds ((max{eps,1-eps}+gamma)/(gamma*T) per step)\n";
    if (advisory)
        out << "NOTE: clamping activated during this run; bound checks are advisory.\n";
    for (std::size_t i = 0; i < per_step.size(); ++i) {
        const auto& sb = per_step[i];
        out << "step " << (i + 1) << ": T=" << sb.trials << " eps=" << fmt_full(sb.target_eps)
            << " gamma=" << fmt_full(sb.gamma) << " deviation=" << fmt_full(sb.deviation)
            << " bound=" << fmt_full(sb.bound) << " -> "
            << (sb.satisfied ? "ok" : (advisory ? "EXCEEDED (advisory)" : "VIOLATED")) << "\n";
    }
    out << "overall: deviation=" << fmt_full(overall_deviation)
        << " bound=" << fmt_full(overall_bound) << " -> "
        << (overall_satisfied ? "ok" : (advisory ? "EXCEEDED (advisory)" : "VIOLATED")) << "\n";
    return out.str();
}

std::string render_summary_csv(const RunMetrics& metrics, const Eigen::VectorXd& eps_target) {
    if (!metrics.has_trials()) throw DataError("summary requested with zero trials");
    std::ostringstream out;
    out << "hour,target_eps,error_rate,avg_length,infinite_count\n";
    for (int i = 1; i <= metrics.steps(); ++i) {
        out << i << "," << fmt_sig3(eps_target[i - 1]) << "," << fmt_sig3(metrics.error_rate(i))
            << "," << fmt_sig3(metrics.mean_width(i)) << "," << metrics.infinite(i) << "\n";
    }
    std::int64_t inf_total = 0;
    for (int i = 1; i <= metrics.steps(); ++i) inf_total += metrics.infinite(i);
    out << "overall," << fmt_sig3(eps_target.mean()) << ","
        << fmt_sig3(metrics.overall_error_rate()) << "," << fmt_sig3(metrics.overall_mean_width())
        << "," << inf_total << "\n";
    return out.str();
}

std::string render_summary_text(const RunMetrics& metrics, const Eigen::VectorXd& eps_target) {
    if (!metrics.has_trials()) throw DataError("summary requested with zero trials");
    std::ostringstream out;
    auto cell = [](const std::string& s) {
        std::string c = s;
        while (c.size() < 10) c = " " + c;
        return c;
    };
    out << "hour       ";
    for (int i = 1; i <= metrics.steps(); ++i) out << cell(std::to_string(i));
    out << cell("overall") << "\n";
    out << "target eps ";
    for (int i = 0; i < metrics.steps(); ++i) out << cell(fmt_sig3(eps_target[i]));
    out << cell(fmt_sig3(eps_target.mean())) << "\n";
    out << "error rate ";
    for (int i = 1; i <= metrics.steps(); ++i) out << cell(fmt_sig3(metrics.error_rate(i)));
    out << cell(fmt_sig3(metrics.overall_error_rate())) << "\n";
    out << "avg length ";
    for (int i = 1; i <= metrics.steps(); ++i) out << cell(fmt_sig3(metrics.mean_width(i)));
    out << cell(fmt_sig3(metrics.overall_mean_width())) << "\n";
    return out.str();
}

std::string render_trace_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream out;
    out << "t,step,lower,upper,eps_t,covered,width\n";
    for (const auto& r : rows) {
        out << r.t << "," << r.step << "," << fmt_full(r.lower) << "," << fmt_full(r.upper) << ","
            << fmt_full(r.eps_t) << "," << r.covered << "," << fmt_full(r.width) << "\n";
    }
    return out.str();
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty trace");
    if (line != "t,step,lower,upper,eps_t,covered,width")
        throw DataError("unexpected trace header: " + line);
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (cells.size() != 7) throw DataError("trace row with " + std::to_string(cells.size()) +
                                               " fields: " + line);
        TraceRow r;
        r.t = parse_int(cells[0]);
        r.step = static_cast<int>(parse_int(cells[1]));
        r.lower = parse_num(cells[2]);
        r.upper = parse_num(cells[3]);
        r.eps_t = parse_num(cells[4]);
        r.covered = static_cast<int>(parse_int(cells[5]));
        r.width = parse_num(cells[6]);
        rows.push_back(r);
    }
    return rows;
}

std::string render_clamp_log(const std::vector<aci::ClampEvent>& log) {
    std::ostringstream out;
    out << "t,step,before,after,bound\n";
    for (const auto& ev : log) {
        out << ev.t << "," << ev.step << "," << fmt_full(ev.before) << "," << fmt_full(ev.after)
            << "," << (ev.at_floor ? "floor" : "ceiling") << "\n";
    }
    return out.str();
}

}  // namespace covcast::eval
