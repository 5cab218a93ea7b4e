#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "covcast/config.hpp"
#include "covcast/errors.hpp"
#include "covcast/pipeline.hpp"

using namespace covcast;

namespace {

const std::string kSynthConfig =
    "config_version = 1\n"
    "p_lags = 2\n"
    "horizon = 3\n"
    "train_pairs = 20\n"
    "ridge_a = 1.0\n"
    "eps = 0.3\n"
    "gamma = 0.01\n"
    "generator = iid-gaussian\n"
    "steps = 80\n"
    "seed = 5\n";

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parser covers the full key set") {
    const auto c = cfg::parse_config_text(
        "# experiment description\n"
        "config_version = 1\n"
        "dataset = data/demand.csv\n"
        "timestamp_column = ts\n"
        "demand_column = load\n"
        "temperature_column = temp\n"
        "p_lags = 24   # one day\n"
        "horizon = 5\n"
        "exog_features = temperature, hour, weekday\n"
        "exog_alignment = first_target\n"
        "train_pairs = 476\n"
        "ridge_a = 8.0\n"
        "eps = 0.1, 0.15, 0.2, 0.25, 0.3\n"
        "gamma = 0.005\n"
        "clamp_floor = auto\n"
        "clamp_ceiling = 0.999999999\n"
        "freeze_after_training = false\n"
        "out_dir = results/run1\n");

    CHECK(c.dataset == "data/demand.csv");
    CHECK(c.schema.timestamp_col == "ts");
    CHECK(c.schema.demand_col == "load");
    CHECK(c.schema.temperature_col == "temp");
    CHECK(c.window.p_lags == 24);
    CHECK(c.window.horizon == 5);
    CHECK(c.window.exog_features ==
          std::vector<std::string>{"temperature", "hour", "weekday"});
    CHECK(c.window.alignment == ts::ExogAlignment::first_target);
    CHECK(c.train_pairs == 476);
    REQUIRE(c.ridge_a.has_value());
    CHECK(*c.ridge_a == 8.0);
    CHECK(!c.gcv_grid.has_value());
    CHECK(c.aci.eps_target[0] == 0.1);
    CHECK(c.aci.eps_target[4] == 0.3);
    CHECK(c.aci.gamma == Eigen::VectorXd::Constant(5, 0.005));  // broadcast
    CHECK(c.aci.clamp_floor_auto);
    REQUIRE(c.aci.clamp_ceiling.has_value());
    CHECK(*c.aci.clamp_ceiling == 0.999999999);
    CHECK(!c.freeze_after_training);
    CHECK(c.out_dir == "results/run1");
}

TEST_CASE("config version discipline") {
    CHECK_THROWS_AS(cfg::parse_config_text("p_lags = 2\n"), ConfigError);
    CHECK_THROWS_AS(cfg::parse_config_text("config_version = 2\n"), ConfigError);
    CHECK_THROWS_AS(cfg::parse_config_text(""), ConfigError);
    // Comments and blank lines may precede the version line.
    CHECK_NOTHROW(cfg::parse_config_text("# hi\n\nconfig_version = 1\n"
                                         "p_lags = 1\nhorizon = 1\ntrain_pairs = 5\n"
                                         "ridge_a = 1\neps = 0.5\ngamma = 0.1\n"));
}

TEST_CASE("config rejects unknown and duplicate keys") {
    CHECK_THROWS_WITH_AS(
        cfg::parse_config_text(kSynthConfig + "banana = 1\n"),
        doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg::parse_config_text(kSynthConfig + "p_lags = 3\n"),
                         doctest::Contains("duplicate"), ConfigError);
}

TEST_CASE("step vectors broadcast or match the horizon") {
    auto text = [&](const std::string& eps, const std::string& gamma) {
        return "config_version = 1\np_lags = 1\nhorizon = 3\ntrain_pairs = 10\n"
               "ridge_a = 1\neps = " + eps + "\ngamma = " + gamma + "\n";
    };
    const auto broadcast = cfg::parse_config_text(text("0.2", "0.01"));
    CHECK(broadcast.aci.eps_target == Eigen::VectorXd::Constant(3, 0.2));

    const auto listed = cfg::parse_config_text(text("0.1,0.2,0.3", "0.01,0.02,0.03"));
    CHECK(listed.aci.eps_target[2] == 0.3);
    CHECK(listed.aci.gamma[1] == 0.02);

    CHECK_THROWS_AS(cfg::parse_config_text(text("0.1,0.2", "0.01")), ConfigError);
    CHECK_THROWS_AS(cfg::parse_config_text(text("0.2", "0")), ConfigError);
    CHECK_THROWS_AS(cfg::parse_config_text(text("1.5", "0.01")), ConfigError);
}

TEST_CASE("gcv grid parsing") {
    const std::string base =
        "config_version = 1\np_lags = 1\nhorizon = 1\ntrain_pairs = 10\n"
        "eps = 0.2\ngamma = 0.01\n";

    const auto logspace = cfg::parse_config_text(base + "gcv_grid = logspace:0.01,100,5\n");
    REQUIRE(logspace.gcv_grid.has_value());
    REQUIRE(logspace.gcv_grid->values.size() == 5);
    CHECK(logspace.gcv_grid->values.front() == doctest::Approx(0.01));
    CHECK(logspace.gcv_grid->values.back() == doctest::Approx(100.0));

    const auto listed = cfg::parse_config_text(base + "gcv_grid = 0.5, 1, 2\n");
    REQUIRE(listed.gcv_grid.has_value());
    CHECK(listed.gcv_grid->values == std::vector<double>{0.5, 1.0, 2.0});

    // neither ridge_a nor gcv_grid: tuning happens later on a default grid
    const auto defaulted = cfg::parse_config_text(base);
    CHECK(!defaulted.ridge_a.has_value());
    CHECK(!defaulted.gcv_grid.has_value());

    CHECK_THROWS_AS(cfg::parse_config_text(base + "ridge_a = 1\ngcv_grid = 0.5,1\n"),
                    ConfigError);
    CHECK_THROWS_AS(cfg::parse_config_text(base + "gcv_grid = logspace:0.01,100\n"), ConfigError);
}

TEST_CASE("semantic validation") {
    CHECK_THROWS_WITH_AS(
        cfg::parse_config_text("config_version = 1\np_lags = 1\nhorizon = 3\n"
                               "train_pairs = 2\nridge_a = 1\neps = 0.2\ngamma = 0.01\n"),
        doctest::Contains("train_pairs"), ConfigError);
    CHECK_THROWS_AS(
        cfg::parse_config_text("config_version = 1\np_lags = 0\nhorizon = 1\n"
                               "train_pairs = 5\nridge_a = 1\neps = 0.2\ngamma = 0.01\n"),
        ConfigError);
    CHECK_THROWS_AS(
        cfg::parse_config_text("config_version = 1\np_lags = 1\nhorizon = 1\n"
                               "train_pairs = 5\nridge_a = -2\neps = 0.2\ngamma = 0.01\n"),
        ConfigError);
}

TEST_CASE("synthetic runs are deterministic") {
    const auto config = cfg::parse_config_text(kSynthConfig);
    const auto first = pipeline::run_synthetic(config);
    const auto second = pipeline::run_synthetic(config);
    CHECK(eval::render_trace_csv(first.trace) == eval::render_trace_csv(second.trace));
    CHECK(first.eps_final == second.eps_final);
    CHECK(eval::render_summary_csv(first.metrics, first.eps_target) ==
          eval::render_summary_csv(second.metrics, second.eps_target));
}

TEST_CASE("online accounting over a synthetic run") {
    const auto config = cfg::parse_config_text(kSynthConfig);
    const auto res = pipeline::run_synthetic(config);

    // 80 values, p = 2, h = 3 -> 76 pairs; 20 train, 56 test.
    CHECK(res.train_pairs == 20);
    CHECK(res.test_pairs == 56);
    CHECK(res.initial_absorbed == 18);  // train minus (h - 1) leak guard
    CHECK(res.ridge_a == 1.0);
    CHECK(!res.ridge_a_tuned);

    // Every step of every test prediction is eventually scored.
    for (int i = 1; i <= 3; ++i) CHECK(res.metrics.trials(i) == 56);
    CHECK(res.trace.size() == 3 * 56);

    // Origins of step-1 rows run from train + p to the end of the series.
    std::int64_t expect_origin = 22;
    for (const auto& row : res.trace)
        if (row.step == 1) CHECK(row.t == expect_origin++);
    CHECK(expect_origin == 78);

    // Warm-up plateau: step i predictions carry the unmoved target level
    // until the first step-i error arrives (i - 1 ticks after the first).
    for (int i = 1; i <= 3; ++i)
        for (const auto& row : res.trace)
            if (row.step == i && row.t < 22 + i)
                CHECK(row.eps_t == res.eps_target[i - 1]);

    // The trace is emitted in scoring order: time of the scored value, then step.
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
        const auto& prev = res.trace[k - 1];
        const auto& cur = res.trace[k];
        const auto scored_prev = prev.t + prev.step - 1;
        const auto scored_cur = cur.t + cur.step - 1;
        CHECK(scored_prev <= scored_cur);
        if (scored_prev == scored_cur) CHECK(prev.step < cur.step);
    }
}

TEST_CASE("trace-only audit agrees with the in-run bound report") {
    auto config = cfg::parse_config_text(kSynthConfig + "clamp_floor = off\n");
    const auto res = pipeline::run_synthetic(config);
    REQUIRE(res.clamp_log.empty());

    const auto audited = pipeline::check_trace(res.trace);
    REQUIRE(audited.per_step.size() == res.bounds.per_step.size());
    for (std::size_t i = 0; i < audited.per_step.size(); ++i) {
        CHECK(audited.per_step[i].target_eps == res.eps_target[static_cast<Eigen::Index>(i)]);
        CHECK(audited.per_step[i].gamma ==
              doctest::Approx(res.gamma[static_cast<Eigen::Index>(i)]).epsilon(1e-12));
        CHECK(audited.per_step[i].trials == res.bounds.per_step[i].trials);
        CHECK(audited.per_step[i].deviation ==
              doctest::Approx(res.bounds.per_step[i].deviation).epsilon(1e-12));
        CHECK(audited.per_step[i].bound ==
              doctest::Approx(res.bounds.per_step[i].bound).epsilon(1e-9));
    }
    CHECK(audited.overall_deviation ==
          doctest::Approx(res.bounds.overall_deviation).epsilon(1e-12));
    CHECK(!audited.advisory);
}

TEST_CASE("audit fails when the trace shows no controller movement") {
    std::vector<eval::TraceRow> rows;
    for (int k = 0; k < 5; ++k)
        rows.push_back({20 + k, 1, -1.0, 1.0, 0.2, 1, 2.0});  // eps_t never moves
    CHECK_THROWS_AS(pipeline::check_trace(rows), DataError);
    CHECK_THROWS_AS(pipeline::check_trace({}), DataError);
}

TEST_CASE("frozen-model runs keep scoring without absorbing") {
    auto config = cfg::parse_config_text(kSynthConfig + "freeze_after_training = true\n");
    const auto frozen = pipeline::run_synthetic(config);
    CHECK(frozen.trace.size() == 3 * 56);
    CHECK(frozen.metrics.has_trials());

    // Same seed, absorbing: the models diverge, so the traces must differ.
    const auto live = pipeline::run_synthetic(cfg::parse_config_text(kSynthConfig));
    CHECK(eval::render_trace_csv(frozen.trace) != eval::render_trace_csv(live.trace));
}

TEST_CASE("run rejects a split with no test pairs") {
    auto config = cfg::parse_config_text(kSynthConfig);
    config.train_pairs = 76;  // exactly the pair count of an 80-step series
    CHECK_THROWS_AS(pipeline::run_synthetic(config), DataError);
}

TEST_CASE("outputs land in the documented file set") {
    const auto config = cfg::parse_config_text(kSynthConfig);
    const auto res = pipeline::run_synthetic(config);
    const auto dir =
        std::filesystem::temp_directory_path() / "covcast_pipeline_out";
    std::filesystem::remove_all(dir);
    pipeline::write_outputs(res, dir.string());

    for (const char* name :
         {"trace.csv", "summary.csv", "summary.txt", "bound_report.txt", "clamp_log.csv"})
        CHECK(std::filesystem::exists(dir / name));

    const auto reparsed = eval::parse_trace_csv(read_file(dir / "trace.csv"));
    REQUIRE(reparsed.size() == res.trace.size());
    CHECK(eval::render_trace_csv(reparsed) == eval::render_trace_csv(res.trace));
    CHECK(read_file(dir / "summary.csv").rfind("hour,target_eps", 0) == 0);
    CHECK(read_file(dir / "clamp_log.csv").rfind("t,step,before", 0) == 0);
}

TEST_CASE("dataset mode maps onto the same engine") {
    // A tiny CSV exercised end to end through run_dataset.
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv_path = dir / "covcast_pipeline_demand.csv";
    {
        std::ofstream out(csv_path);
        out << ",Demand,Temperature\n";
        int hour = 0, day = 1;
        for (int k = 0; k < 120; ++k) {
            char ts[48];
            std::snprintf(ts, sizeof ts, "2014-01-%02d %02d:00:00", day % 100, hour % 100);
            out << ts << "," << (3.0 + 0.5 * std::sin(0.3 * k)) << "," << (15.0 + 0.1 * k) << "\n";
            if (++hour == 24) {
                hour = 0;
                ++day;
            }
        }
    }
    auto config = cfg::parse_config_text(
        "config_version = 1\n"
        "dataset = " + csv_path.string() + "\n"
        "p_lags = 3\nhorizon = 2\ntrain_pairs = 40\nridge_a = 2.0\n"
        "eps = 0.25\ngamma = 0.02\nexog_features = temperature,hour\n");
    const auto res = pipeline::run_dataset(config);
    // 120 values, p = 3, h = 2 -> 116 pairs; 40 train leaves 76 test.
    CHECK(res.test_pairs == 76);
    CHECK(res.metrics.trials(1) == 76);
    CHECK(res.metrics.trials(2) == 76);

    config.dataset.clear();
    CHECK_THROWS_AS(pipeline::run_dataset(config), ConfigError);
}
