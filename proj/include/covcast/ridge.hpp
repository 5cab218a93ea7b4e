#pragma once

#include <Eigen/Core>
#include <vector>

#include "covcast/timeseries.hpp"

namespace covcast::ridge {

// Quantities of the regression augmented with one test object, computed
// without touching the owning state. The view snapshots everything it
// exposes, so it stays valid across later absorptions.
class TestAugmentedView {
  public:
    template <typename XHist, typename YHist>
    TestAugmentedView(Eigen::MatrixXd m_aug, const XHist& x_hist, const YHist& y_hist,
                      const Eigen::MatrixXd& s_accum, const Eigen::VectorXd& x_test)
        : m_aug_(std::move(m_aug)),
          labels_(y_hist),
          cross_all_(x_hist * (m_aug_ * x_test)),
          cross_test_(x_test.dot(m_aug_ * x_test)),
          proj_all_(x_hist * (m_aug_ * s_accum)),
          proj_test_(x_test.transpose() * (m_aug_ * s_accum)) {}

    int n_train() const { return static_cast<int>(labels_.rows()); }
    int label_dim() const { return static_cast<int>(labels_.cols()); }

    // x_j^T M_aug x_test, per training row / all rows / the test row itself.
    double cross(int j) const { return cross_all_[j]; }
    const Eigen::VectorXd& cross_all() const { return cross_all_; }
    double cross_test() const { return cross_test_; }

    // x_j^T M_aug S where S = sum_k x_k y_k^T over training pairs only.
    Eigen::RowVectorXd proj(int j) const { return proj_all_.row(j); }
    const Eigen::MatrixXd& proj_all() const { return proj_all_; }
    const Eigen::RowVectorXd& proj_test() const { return proj_test_; }

    const Eigen::MatrixXd& labels() const { return labels_; }
    const Eigen::MatrixXd& m_aug() const { return m_aug_; }

  private:
    Eigen::MatrixXd m_aug_;       // (X_aug^T X_aug + aI)^{-1}, test row included
    Eigen::MatrixXd labels_;      // n_train x h snapshot
    Eigen::VectorXd cross_all_;   // n_train
    double cross_test_;
    Eigen::MatrixXd proj_all_;    // n_train x h
    Eigen::RowVectorXd proj_test_;  // h
};

// Online ridge regression state: the regularised Gram inverse
// M = (X^T X + a I_p)^{-1} over absorbed objects, maintained by rank-one
// updates, plus the full example history and the accumulator S = sum x_k y_k^T.
class RidgeState {
  public:
    // a == 0 defers queries until the absorbed objects reach rank p.
    RidgeState(double a, int p_dim, int h_dim);

    void absorb(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
    void absorb(const ts::SupervisedPair& pair) { absorb(pair.x, pair.y); }

    // Non-mutating rank-one augmentation with a test object.
    TestAugmentedView peek_with_test(const Eigen::VectorXd& x_test) const;

    bool queryable() const;
    int n_train() const { return n_train_; }
    int p_dim() const { return p_; }
    int h_dim() const { return h_; }
    double a() const { return a_; }
    const Eigen::MatrixXd& gram_inverse() const;
    // Views over the absorbed history (n_train rows).
    Eigen::Ref<const Eigen::MatrixXd> x_history() const { return x_store_.topRows(n_train_); }
    Eigen::Ref<const Eigen::MatrixXd> y_history() const { return y_store_.topRows(n_train_); }
    const Eigen::MatrixXd& s_accum() const { return s_; }

  private:
    void ensure_capacity(int rows);
    void materialize_deferred();

    double a_;
    int p_;
    int h_;
    int n_train_ = 0;
    bool deferred_ = false;       // a == 0 and M not yet materialised
    Eigen::MatrixXd m_;           // p x p
    Eigen::MatrixXd s_;           // p x h
    Eigen::MatrixXd x_store_;     // capacity x p, first n_train_ rows valid
    Eigen::MatrixXd y_store_;     // capacity x h
};

struct GcvGrid {
    std::vector<double> values;  // ascending, positive (0 tolerated: skipped if singular)

    static GcvGrid log_spaced(double lo, double hi, int count);
};

struct GcvResult {
    double a = 0;
    std::vector<double> scores;        // one per grid point, NaN where skipped
    std::vector<double> grid;
};

// GCV(a) = n * |(I - H_a) Y|_F^2 / trace(I - H_a)^2 over the supplied pairs.
// Ties broken toward the larger a. Singular a = 0 grid points are skipped.
GcvResult gcv_tune(const std::vector<ts::SupervisedPair>& pairs, const GcvGrid& grid);

}  // namespace covcast::ridge
