#include "covcast/ridge.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "covcast/errors.hpp"

namespace covcast::ridge {

RidgeState::RidgeState(double a, int p_dim, int h_dim) : a_(a), p_(p_dim), h_(h_dim) {
    if (a < 0) throw ConfigError("ridge parameter must be nonnegative");
    if (p_dim < 1 || h_dim < 1) throw ConfigError("ridge dimensions must be positive");
    s_ = Eigen::MatrixXd::Zero(p_, h_);
    x_store_.resize(0, p_);
    y_store_.resize(0, h_);
    if (a > 0) {
        m_ = Eigen::MatrixXd::Identity(p_, p_) / a;
    } else {
        deferred_ = true;
    }
}

void RidgeState::ensure_capacity(int rows) {
    if (x_store_.rows() >= rows) return;
    const int cap = std::max<int>(rows, static_cast<int>(x_store_.rows()) * 2 + 8);
    Eigen::MatrixXd nx(cap, p_), ny(cap, h_);
    nx.topRows(n_train_) = x_store_.topRows(n_train_);
    ny.topRows(n_train_) = y_store_.topRows(n_train_);
    x_store_.swap(nx);
    y_store_.swap(ny);
}

void RidgeState::materialize_deferred() {
    // a == 0: invert the bare Gram matrix once it has full rank.
    Eigen::MatrixXd gram = x_history().transpose() * x_history();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) return;  // stay deferred until rank p
    m_ = lu.inverse();
    m_ = ((m_ + m_.transpose()) / 2.0).eval();
    deferred_ = false;
}

void RidgeState::absorb(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != p_ || y.size() != h_)
        throw DataError("absorb: dimension mismatch (got x " + std::to_string(x.size()) + ", y " +
                        std::to_string(y.size()) + ")");
    ensure_capacity(n_train_ + 1);
    x_store_.row(n_train_) = x.transpose();
    y_store_.row(n_train_) = y.transpose();
    ++n_train_;
    s_ += x * y.transpose();
    if (deferred_) {
        materialize_deferred();
        return;
    }
    const Eigen::VectorXd mx = m_ * x;
    const double denom = 1.0 + x.dot(mx);
    m_.noalias() -= (mx * mx.transpose()) / denom;
    m_ = ((m_ + m_.transpose()) / 2.0).eval();  // suppress asymmetry drift
}

bool RidgeState::queryable() const { return !deferred_; }

const Eigen::MatrixXd& RidgeState::gram_inverse() const {
    if (deferred_)
        throw NumericalError("ridge state not queryable: a = 0 and absorbed objects below rank " +
                             std::to_string(p_));
    return m_;
}

TestAugmentedView RidgeState::peek_with_test(const Eigen::VectorXd& x_test) const {
    if (x_test.size() != p_) throw DataError("peek_with_test: dimension mismatch");
    const Eigen::MatrixXd& m = gram_inverse();
    const Eigen::VectorXd mx = m * x_test;
    const double denom = 1.0 + x_test.dot(mx);
    Eigen::MatrixXd m_aug = m - (mx * mx.transpose()) / denom;
    m_aug = ((m_aug + m_aug.transpose()) / 2.0).eval();
    return TestAugmentedView(std::move(m_aug), x_store_.topRows(n_train_),
                             y_store_.topRows(n_train_), s_, x_test);
}

GcvGrid GcvGrid::log_spaced(double lo, double hi, int count) {
    if (!(lo > 0) || !(hi > lo) || count < 2)
        throw ConfigError("log-spaced grid needs 0 < lo < hi and count >= 2");
    GcvGrid g;
    g.values.reserve(count);
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < count; ++i)
        g.values.push_back(std::pow(10.0, llo + (lhi - llo) * i / (count - 1)));
    return g;
}

GcvResult gcv_tune(const std::vector<ts::SupervisedPair>& pairs, const GcvGrid& grid) {
    if (pairs.size() < 2) throw DataError("gcv_tune needs at least 2 pairs");
    if (grid.values.empty()) throw ConfigError("gcv grid is empty");
    for (std::size_t k = 1; k < grid.values.size(); ++k)
        if (!(grid.values[k] > grid.values[k - 1]))
            throw ConfigError("gcv grid must be strictly ascending");
    const int n = static_cast<int>(pairs.size());
    const int p = static_cast<int>(pairs[0].x.size());
    const int h = static_cast<int>(pairs[0].y.size());

    Eigen::MatrixXd x(n, p), y(n, h);
    for (int i = 0; i < n; ++i) {
        x.row(i) = pairs[i].x.transpose();
        y.row(i) = pairs[i].y.transpose();
    }

    // Eigendecomposition of X^T X lets every grid point be evaluated in
    // O(n p h) without re-inverting: H_a = (XU) diag(1/(lam+a)) (XU)^T ... X^T.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x);
    if (es.info() != Eigen::Success) throw NumericalError("gcv_tune: eigendecomposition failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd xu = x * es.eigenvectors();          // n x p
    const Eigen::MatrixXd z = es.eigenvectors().transpose() * (x.transpose() * y);  // p x h

    GcvResult res;
    res.grid = grid.values;
    res.scores.assign(grid.values.size(), std::numeric_limits<double>::quiet_NaN());
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < grid.values.size(); ++k) {
        const double a = grid.values[k];
        if (a < 0) throw ConfigError("gcv grid values must be nonnegative");
        if (a == 0 && (lam.minCoeff() <= lam_max * 1e-12 || n < p)) continue;  // singular: skip
        Eigen::VectorXd shrink(p);
        double tr_h = 0;
        for (int j = 0; j < p; ++j) {
            shrink[j] = 1.0 / (lam[j] + a);
            tr_h += lam[j] * shrink[j];
        }
        const Eigen::MatrixXd resid = y - xu * shrink.asDiagonal() * z;
        const double denom = static_cast<double>(n) - tr_h;
        const double score = n * resid.squaredNorm() / (denom * denom);
        res.scores[k] = score;
        if (!any || score <= best) {  // <= keeps ties toward the larger a (grid ascends)
            best = score;
            res.a = a;
            any = true;
        }
    }
    if (!any) throw NumericalError("gcv_tune: every grid point was singular");
    return res;
}

}  // namespace covcast::ridge
