#include "covcast/crr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "covcast/errors.hpp"

namespace covcast::crr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Rank arithmetic on eps*n is exact in reals but can sit an ulp off an
// integer in doubles (0.15 * 840 = 126.00000000000001); snap before rounding
// so a representation error cannot shift an order statistic.
double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) <= 1e-9 ? r : v;
}
}  // namespace

bool IntervalVector::finite(int i) const {
    return std::isfinite(lower[i]) && std::isfinite(upper[i]);
}

double IntervalVector::width(int i) const {
    return finite(i) ? upper[i] - lower[i] : kInf;
}

ResidualComponents compute_components(const ridge::TestAugmentedView& view) {
    const int n_train = view.n_train();
    if (n_train < 1)
        throw NumericalError("compute_components needs at least one training example");
    const int h = view.label_dim();

    ResidualComponents c;
    c.a.resize(n_train + 1, h);
    c.b.resize(n_train + 1);

    c.a.topRows(n_train) = view.labels() - view.proj_all();
    c.a.row(n_train) = -view.proj_test();
    c.b.head(n_train) = -view.cross_all();
    c.b[n_train] = 1.0 - view.cross_test();
    return c;
}

IntervalVector predict_intervals(const ResidualComponents& comps, const Eigen::VectorXd& eps) {
    const int n = comps.n_aug();
    const int n_train = n - 1;
    const int h = comps.steps();
    if (eps.size() != h)
        throw ConfigError("significance vector length " + std::to_string(eps.size()) +
                          " does not match " + std::to_string(h) + " steps");
    if (n_train < 1) throw NumericalError("predict_intervals needs n >= 2");

    IntervalVector iv;
    iv.lower.resize(h);
    iv.upper.resize(h);
    iv.eps = eps;
    iv.origin = comps.origin;

    const double b_test = comps.b[n_train];
    // b is column-constant across steps, so the critical-point geometry is
    // shared; only the a-column changes per step.
    std::vector<double> crit;
    crit.reserve(n_train);
    for (int i = 0; i < h; ++i) {
        const double e = eps[i];
        if (!(e > 0.0 && e < 1.0))
            throw ConfigError("significance level must lie in (0,1), got " + std::to_string(e));
        if (e * n < 2.0 - 1e-12)
            throw NumericalError("interval undefined: eps = " + std::to_string(e) +
                                 " below 2/n with n = " + std::to_string(n));

        crit.clear();
        const double a_test = comps.a(n_train, i);
        for (int j = 0; j < n_train; ++j) {
            if (b_test > comps.b[j])
                crit.push_back((comps.a(j, i) - a_test) / (b_test - comps.b[j]));
            // else: the row contributes (-inf, +inf) to both lists
        }
        std::sort(crit.begin(), crit.end());
        const int n_inf = n_train - static_cast<int>(crit.size());

        const int lo_rank = static_cast<int>(std::floor(snap(e / 2.0 * n)));          // 1-indexed
        const int hi_rank = static_cast<int>(std::ceil(snap((1.0 - e / 2.0) * n)));   // 1-indexed
        // Definedness (eps >= 2/n) makes 1 <= lo_rank and hi_rank <= n - 1.

        // Lower list ascending: n_inf copies of -inf, then crit.
        if (lo_rank <= n_inf)
            iv.lower[i] = -kInf;
        else
            iv.lower[i] = crit[lo_rank - n_inf - 1];
        // Upper list ascending: crit, then n_inf copies of +inf.
        if (hi_rank > static_cast<int>(crit.size()))
            iv.upper[i] = kInf;
        else
            iv.upper[i] = crit[hi_rank - 1];

        if (iv.lower[i] > iv.upper[i])
            throw NumericalError("interval bounds crossed at step " + std::to_string(i + 1));
    }
    return iv;
}

}  // namespace covcast::crr
