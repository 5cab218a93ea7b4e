// covcast: online multi-step-ahead conformal forecasting.
//
// Subcommands:
//   run   --config <path> [--out <dir>]          dataset experiment
//   synth --config <path> [--generator <name>] [--steps <N>] [--seed <S>] [--out <dir>]
//   check --trace <csv>                          bound report from a trace
//   tune  --config <path>                        ridge parameter by GCV only
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "covcast/errors.hpp"
#include "covcast/pipeline.hpp"

namespace {

int run_cmd(const std::string& config_path, const std::string& out_override) {
    auto config = covcast::cfg::load_config(config_path);
    if (!out_override.empty()) config.out_dir = out_override;
    const auto result = covcast::pipeline::run_dataset(config);
    covcast::pipeline::write_outputs(result, config.out_dir);
    std::cout << "ridge a = " << result.ridge_a << (result.ridge_a_tuned ? " (tuned)" : " (fixed)")
              << ", train pairs = " << result.train_pairs
              << ", test pairs = " << result.test_pairs << "\n\n";
    std::cout << covcast::eval::render_summary_text(result.metrics, result.eps_target) << "\n";
    std::cout << result.bounds.render();
    if (!result.clamp_log.empty())
        std::cout << "clamp activations: " << result.clamp_log.size() << " (see clamp_log.csv)\n";
    std::cout << "outputs written to " << config.out_dir << "\n";
    return 0;
}

int synth_cmd(const std::string& config_path, const std::string& generator, std::int64_t steps,
              std::int64_t seed, const std::string& out_override) {
    auto config = covcast::cfg::load_config(config_path);
    if (!generator.empty()) config.generator.kind = covcast::cfg::generator_from_name(generator);
    if (steps > 0) config.generator.steps = steps;
    if (seed >= 0) config.generator.seed = static_cast<std::uint64_t>(seed);
    if (!out_override.empty()) config.out_dir = out_override;
    const auto result = covcast::pipeline::run_synthetic(config);
    covcast::pipeline::write_outputs(result, config.out_dir);
    std::cout << "generator = " << covcast::cfg::generator_name(config.generator.kind)
              << ", steps = " << config.generator.steps << ", seed = " << config.generator.seed
              << "\n\n";
    std::cout << covcast::eval::render_summary_text(result.metrics, result.eps_target) << "\n";
    std::cout << result.bounds.render();
    std::cout << "outputs written to " << config.out_dir << "\n";
    return 0;
}

int check_cmd(const std::string& trace_path) {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) throw covcast::DataError("cannot open trace file: " + trace_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto rows = covcast::eval::parse_trace_csv(buf.str());
    const auto report = covcast::pipeline::check_trace(rows);
    std::cout << "reconstructed from trace (targets from warm-up rows, gamma from the first "
                 "update delta); clamping status unknown.\n";
    std::cout << report.render();
    return 0;
}

int tune_cmd(const std::string& config_path) {
    auto config = covcast::cfg::load_config(config_path);
    if (config.dataset.empty())
        throw covcast::ConfigError("tune requires a dataset in the config");
    const auto frame = covcast::ts::load_csv(config.dataset, config.schema);
    const auto pairs = covcast::ts::make_windows(frame, config.window);
    const std::int64_t initial =
        std::min<std::int64_t>(config.train_pairs - (config.window.horizon - 1),
                               static_cast<std::int64_t>(pairs.size()));
    if (initial < 2) throw covcast::DataError("not enough training pairs to tune");
    const std::vector<covcast::ts::SupervisedPair> tune_set(pairs.begin(), pairs.begin() + initial);
    const auto grid = config.gcv_grid ? *config.gcv_grid
                                      : covcast::ridge::GcvGrid::log_spaced(1e-4, 1e4, 25);
    const auto res = covcast::ridge::gcv_tune(tune_set, grid);
    std::printf("%14s %16s\n", "a", "gcv");
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        if (std::isnan(res.scores[i]))
            std::printf("%14.6g %16s  (skipped: singular)\n", res.grid[i], "-");
        else
            std::printf("%14.6g %16.10g%s\n", res.grid[i], res.scores[i],
                        res.grid[i] == res.a ? "  <- chosen" : "");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online multi-step-ahead conformal forecasting"};
    app.require_subcommand(1);

    std::string config_path, out_dir, generator, trace_path;
    std::int64_t steps = 0, seed = -1;

    auto* run = app.add_subcommand("run", "run a dataset experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");

    auto* synth = app.add_subcommand("synth", "run a synthetic-series experiment");
    synth->add_option("--config", config_path, "experiment config file")->required();
    synth->add_option("--generator", generator, "iid-gaussian | ar1 | mean-shift | trend");
    synth->add_option("--steps", steps, "series length (overrides config)");
    synth->add_option("--seed", seed, "rng seed (overrides config)");
    synth->add_option("--out", out_dir, "output directory (overrides config)");

    auto* check = app.add_subcommand("check", "coverage-bound report from an existing trace");
    check->add_option("--trace", trace_path, "trace csv produced by run/synth")->required();

    auto* tune = app.add_subcommand("tune", "choose the ridge parameter by GCV");
    tune->add_option("--config", config_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_cmd(config_path, out_dir);
        if (synth->parsed()) return synth_cmd(config_path, generator, steps, seed, out_dir);
        if (check->parsed()) return check_cmd(trace_path);
        if (tune->parsed()) return tune_cmd(config_path);
        return 2;
    } catch (const covcast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const covcast::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const covcast::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 4;
    }
}
