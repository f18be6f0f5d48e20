#include "longterm/estimators/baselines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "longterm/errors.hpp"

namespace longterm {

EffectTrajectory estimate_ceb(const PanelDataset& ds) {
  const int te = ds.window().t_experimental;
  EffectTrajectory traj;
  traj.t_experimental = te;
  traj.estimator = "ceb";
  traj.options_fingerprint = "ceb()";
  traj.estimates = observed_effects(ds, te);
  const double mean =
      std::accumulate(traj.estimates.begin(), traj.estimates.end(), 0.0) / te;
  traj.estimates.resize(ds.window().t_total, mean);
  return traj;
}

namespace {

// Per-equation least squares without intercept; nearly-empty or
// underdetermined systems go through a 1e-8 ridge on the normal equations.
struct VarFit {
  Eigen::MatrixXd coef;  // (V*p) x V
  bool ridge_fallback = false;
};

VarFit fit_var(const Eigen::MatrixXd& series, int p) {
  const long te = series.rows();
  const long v = series.cols();
  const long rows = te - p;
  const long width = v * p;
  Eigen::MatrixXd x(rows, width);
  for (long r = 0; r < rows; ++r)
    for (int j = 1; j <= p; ++j)
      x.block(r, static_cast<long>(j - 1) * v, 1, v) = series.row(p + r - j);

  VarFit fit;
  fit.coef.resize(width, v);
  const Eigen::MatrixXd targets = series.bottomRows(rows);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (rows >= width && qr.rank() == width) {
    fit.coef = qr.solve(targets);
  } else {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += 1e-8;
    fit.coef = gram.ldlt().solve(x.transpose() * targets);
    fit.ridge_fallback = true;
  }
  return fit;
}

Eigen::MatrixXd arm_mean_series(const PanelDataset& ds, int arm,
                                const std::vector<int>& surrogate_dims) {
  const int te = ds.window().t_experimental;
  const auto& units = ds.arm_units(arm);
  const double n = static_cast<double>(units.size());
  Eigen::MatrixXd series(te, 1 + surrogate_dims.size());
  series.setZero();
  for (int t = 1; t <= te; ++t) {
    double ysum = 0.0;
    std::vector<double> ssum(surrogate_dims.size(), 0.0);
    for (std::uint32_t i : units) {
      ysum += ds.outcome(i, t);
      for (std::size_t k = 0; k < surrogate_dims.size(); ++k)
        ssum[k] += ds.surrogate(i, t, surrogate_dims[k]);
    }
    series(t - 1, 0) = ysum / n;
    for (std::size_t k = 0; k < surrogate_dims.size(); ++k)
      series(t - 1, 1 + k) = ssum[k] / n;
  }
  return series;
}

}  // namespace

EffectTrajectory estimate_var(const PanelDataset& ds, RandomStream& stream) {
  const int te = ds.window().t_experimental;
  const int t_total = ds.window().t_total;
  if (te < 2) throw EstimationError("estimate_var: needs T_E >= 2");

  if (te == 2) {
    EffectTrajectory traj = estimate_ceb(ds);
    traj.estimator = "var";
    traj.options_fingerprint = "var(p=0,ceb_fallback=1)";
    return traj;
  }

  const int p = te - 2;
  const int v_full = 1 + ds.d_surrogates();
  std::vector<int> dims;
  if (p < v_full) {
    const int keep = std::min(p - 1, ds.d_surrogates());
    const auto pick = stream.sample_without_replacement(ds.d_surrogates(), keep);
    dims.assign(pick.begin(), pick.end());
    std::sort(dims.begin(), dims.end());
  } else {
    dims.resize(ds.d_surrogates());
    std::iota(dims.begin(), dims.end(), 0);
  }

  bool ridge = false;
  Eigen::MatrixXd forecast_y(2, t_total - te);
  for (int arm = 0; arm <= 1; ++arm) {
    Eigen::MatrixXd series = arm_mean_series(ds, arm, dims);
    const VarFit fit = fit_var(series, p);
    ridge = ridge || fit.ridge_fallback;
    const long v = series.cols();
    std::vector<Eigen::RowVectorXd> hist;
    for (long r = 0; r < series.rows(); ++r) hist.push_back(series.row(r));
    for (int t = te + 1; t <= t_total; ++t) {
      Eigen::RowVectorXd lag(v * p);
      for (int j = 1; j <= p; ++j)
        lag.segment(static_cast<long>(j - 1) * v, v) = hist[hist.size() - j];
      const Eigen::RowVectorXd nxt = lag * fit.coef;
      hist.push_back(nxt);
      forecast_y(arm, t - te - 1) = nxt(0);
    }
  }

  EffectTrajectory traj;
  traj.t_experimental = te;
  traj.estimator = "var";
  traj.estimates = observed_effects(ds, te);
  traj.estimates.resize(t_total, 0.0);
  for (int t = te + 1; t <= t_total; ++t)
    traj.estimates[t - 1] = forecast_y(1, t - te - 1) - forecast_y(0, t - te - 1);

  std::ostringstream fp;
  fp << "var(p=" << p << ",vars=y";
  for (int d : dims) fp << "+s" << (d + 1);
  if (ridge) fp << ",ridge_fallback=1";
  fp << ")";
  traj.options_fingerprint = fp.str();
  return traj;
}

}  // namespace longterm
