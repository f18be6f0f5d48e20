#include "longterm/estimators/knn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>

#include "longterm/errors.hpp"
#include "longterm/estimators/lagged.hpp"

namespace longterm {

namespace {

// Mean of the k nearest training targets for every query row.
Eigen::MatrixXd knn_predict(const Eigen::MatrixXd& train_x,
                            const Eigen::MatrixXd& train_y,
                            const Eigen::MatrixXd& query, int k) {
  const long n_train = train_x.rows();
  const long n_query = query.rows();
  Eigen::MatrixXd out(n_query, train_y.cols());
  std::vector<std::pair<double, long>> dist(n_train);
  for (long q = 0; q < n_query; ++q) {
    for (long r = 0; r < n_train; ++r)
      dist[r] = {(train_x.row(r) - query.row(q)).squaredNorm(), r};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(train_y.cols());
    for (int j = 0; j < k; ++j) acc += train_y.row(dist[j].second);
    out.row(q) = acc / k;
  }
  return out;
}

}  // namespace

EffectTrajectory estimate_knn(const PanelDataset& ds, int k) {
  const int te = ds.window().t_experimental;
  const int t_total = ds.window().t_total;
  if (k < 1) throw EstimationError("estimate_knn: k must be >= 1");
  if (static_cast<std::size_t>(k) > std::min(ds.n_treated(), ds.n_control()))
    throw EstimationError("estimate_knn: k exceeds arm size");

  EffectTrajectory traj;
  traj.t_experimental = te;
  traj.estimator = "knn";
  traj.options_fingerprint = "knn(k=" + std::to_string(k) + ")";
  traj.estimates = observed_effects(ds, te);
  traj.estimates.resize(t_total, 0.0);

  struct ArmState {
    Eigen::MatrixXd train_x, train_y, window;
  };
  auto init_arm = [&](int arm) {
    ArmBlocks blocks(ds, arm, {});
    ArmState st;
    st.train_x = stack_window(blocks, 1, te - 1, false);
    st.train_y = blocks.block(te);
    st.window = stack_window(blocks, 2, te, false);
    return st;
  };
  ArmState arms[2] = {init_arm(0), init_arm(1)};
  const int n_vars = 1 + ds.d_surrogates();

  for (int t = te + 1; t <= t_total; ++t) {
    double means[2];
    for (int a = 0; a <= 1; ++a) {
      ArmState& st = arms[a];
      const Eigen::MatrixXd pred = knn_predict(st.train_x, st.train_y, st.window, k);
      means[a] = pred.col(0).mean();
      if (te - 1 > 1) {
        const long keep = static_cast<long>(te - 2) * n_vars;
        st.window.leftCols(keep) = st.window.rightCols(keep).eval();
        st.window.rightCols(n_vars) = pred;
      } else {
        st.window = pred;
      }
    }
    traj.estimates[t - 1] = means[1] - means[0];
  }
  return traj;
}

}  // namespace longterm
