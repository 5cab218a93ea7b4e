#pragma once

#include <vector>

#include "covcast/config.hpp"

namespace covcast::gen {

// Deterministic synthetic series. Normal deviates come from an explicit
// Box-Muller transform over mt19937_64 so two builds produce identical
// streams regardless of the standard library's normal_distribution.
std::vector<double> generate(const cfg::GeneratorSpec& spec);

}  // namespace covcast::gen
