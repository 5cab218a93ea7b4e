#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covcast/aci.hpp"
#include "covcast/ridge.hpp"
#include "covcast/timeseries.hpp"

namespace covcast::cfg {

enum class GeneratorKind { iid_gaussian, ar1, mean_shift, trend };

GeneratorKind generator_from_name(const std::string& name);
std::string generator_name(GeneratorKind g);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::iid_gaussian;
    std::int64_t steps = 500;
    std::uint64_t seed = 1;
    double mu = 0.0;
    double sigma = 1.0;
    double phi = 0.8;     // ar1 coefficient
    double shift = 3.0;   // mean-shift magnitude (applied from the midpoint)
    double slope = 0.01;  // trend per time step
};

// Everything one experiment needs; parsed from the versioned key-value file.
struct ExperimentConfig {
    // dataset (run mode)
    std::string dataset;
    ts::CsvSchema schema;

    // windowing
    ts::WindowConfig window;

    // split: the online test stream starts at this pair index
    std::int64_t train_pairs = 0;

    // ridge: fixed value or grid-tuned
    std::optional<double> ridge_a;
    std::optional<ridge::GcvGrid> gcv_grid;  // defaulted when neither is given

    aci::AciConfig aci;

    bool freeze_after_training = false;
    std::string out_dir = "out";

    GeneratorSpec generator;  // synth mode

    void validate() const;
};

// Key-value text, `key = value`, '#' comments, first meaningful line must be
// `config_version = 1`. Unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace covcast::cfg
