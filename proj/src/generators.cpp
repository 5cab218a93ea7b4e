#include "covcast/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "covcast/errors.hpp"

namespace covcast::gen {

namespace {

class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Uniforms in (0,1]: never feeds log a zero.
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace

std::vector<double> generate(const cfg::GeneratorSpec& spec) {
    if (spec.steps < 1) throw ConfigError("generator steps must be >= 1");
    if (spec.sigma < 0) throw ConfigError("gen_sigma must be nonnegative");
    NormalSource normal(spec.seed);
    std::vector<double> w(static_cast<std::size_t>(spec.steps));

    switch (spec.kind) {
        case cfg::GeneratorKind::iid_gaussian:
            for (auto& v : w) v = spec.mu + spec.sigma * normal.next();
            break;
        case cfg::GeneratorKind::ar1: {
            if (std::abs(spec.phi) >= 1.0)
                throw ConfigError("gen_phi must satisfy |phi| < 1 for a stationary ar1 series");
            double state = 0;
            for (int burn = 0; burn < 100; ++burn)
                state = spec.phi * state + spec.sigma * normal.next();
            for (auto& v : w) {
                state = spec.phi * state + spec.sigma * normal.next();
                v = spec.mu + state;
            }
            break;
        }
        case cfg::GeneratorKind::mean_shift: {
            const std::size_t half = w.size() / 2;
            for (std::size_t t = 0; t < w.size(); ++t)
                w[t] = spec.mu + (t >= half ? spec.shift : 0.0) + spec.sigma * normal.next();
            break;
        }
        case cfg::GeneratorKind::trend:
            for (std::size_t t = 0; t < w.size(); ++t)
                w[t] = spec.mu + spec.slope * static_cast<double>(t) + spec.sigma * normal.next();
            break;
    }
    return w;
}

}  // namespace covcast::gen
