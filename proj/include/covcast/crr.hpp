#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "covcast/ridge.hpp"

namespace covcast::crr {

// h closed intervals, one per forecast step; bounds may be infinite.
struct IntervalVector {
    Eigen::VectorXd lower;  // h entries, may be -inf
    Eigen::VectorXd upper;  // h entries, may be +inf
    Eigen::VectorXd eps;    // significance vector the intervals were built at
    std::int64_t origin = 0;  // time index of the first predicted value

    int steps() const { return static_cast<int>(lower.size()); }
    bool finite(int i) const;
    double width(int i) const;  // +inf when either bound is infinite
};

// Residual decomposition of the test-augmented ridge fit: for every row j of
// the augmented design (training rows plus the test row last), the signed
// residual at step i is a(j, i) + b(j) * y, linear in the hypothesised test
// label y. b is one column: the coefficient is the same for every step.
struct ResidualComponents {
    Eigen::MatrixXd a;  // n_aug x h; last row is the test row
    Eigen::VectorXd b;  // n_aug; last entry is the test row
    std::int64_t origin = 0;

    int n_aug() const { return static_cast<int>(b.size()); }
    int steps() const { return static_cast<int>(a.cols()); }
};

// a(j, i) = y(j, i) - x_j^T M_aug S_i (zero label for the test row);
// b(j) = [j == test] - x_j^T M_aug x_test. The n x n hat matrix is never
// formed; everything goes through the p x p augmented inverse.
ResidualComponents compute_components(const ridge::TestAugmentedView& view);

// For each step i, every training row j contributes a critical point
// (a(j,i) - a(n,i)) / (b(n) - b(j)) to both endpoint lists when b(n) > b(j),
// and (-inf, +inf) otherwise. The interval is
//   [ l_(floor(eps_i/2 * n)),  u_(ceil((1 - eps_i/2) * n)) ]
// with 1-indexed order statistics over the n-1 training contributions,
// defined only when eps_i >= 2/n (n = n_aug).
IntervalVector predict_intervals(const ResidualComponents& comps, const Eigen::VectorXd& eps);

}  // namespace covcast::crr
