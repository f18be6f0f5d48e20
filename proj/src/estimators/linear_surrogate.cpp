#include "longterm/estimators/linear_surrogate.hpp"

#include <algorithm>
#include <sstream>

#include "longterm/errors.hpp"
#include "longterm/estimators/lagged.hpp"
#include "longterm/numerics/linreg.hpp"

namespace longterm {

namespace {

ArmLinearModel fit_arm(const ArmBlocks& arm, int te,
                       const LinearSurrogateOptions& opts) {
  const Eigen::MatrixXd x = stack_window(arm, 1, te - 1, opts.use_covariates);
  const Eigen::MatrixXd& targets = arm.block(te);
  const long width = x.cols();

  ArmLinearModel model;
  model.coef.resize(width, targets.cols());
  model.intercept.resize(targets.cols());

  const bool too_few_rows = arm.n_units() <= width;
  const bool use_net = opts.elastic_net || too_few_rows;
  model.forced_elastic_net = too_few_rows && !opts.elastic_net;

  for (long v = 0; v < targets.cols(); ++v) {
    const Eigen::VectorXd y = targets.col(v);
    LinearFit fit;
    if (use_net) {
      const int folds =
          std::min<long>(opts.tune_folds, arm.n_units());
      fit = tune_elastic_net(x, y, opts.tune_grid, folds).fit;
    } else {
      try {
        fit = ols_fit(x, y);
      } catch (const SingularDesignError&) {
        fit = ridge_fit(x, y, 1e-8);
        model.ridge_fallback = true;
      }
    }
    model.coef.col(v) = fit.coefficients;
    model.intercept[v] = fit.intercept;
  }
  return model;
}

}  // namespace

SurrogateModelSet fit_linear_surrogate(const PanelDataset& ds,
                                       const LinearSurrogateOptions& opts) {
  const int te = ds.window().t_experimental;
  if (te < 2) throw EstimationError("linear surrogate model needs T_E >= 2");

  ArmBlocks treated(ds, 1, opts.surrogate_subset);
  ArmBlocks control(ds, 0, opts.surrogate_subset);

  SurrogateModelSet set;
  set.n_vars = treated.n_vars();
  set.window_span = te - 1;
  set.options = opts;
  set.treated = fit_arm(treated, te, opts);
  set.control = fit_arm(control, te, opts);

  std::ostringstream fp;
  fp << "lsm(cov=" << (opts.use_covariates ? 1 : 0)
     << ",reg=" << (opts.elastic_net ? "elastic_net" : "none");
  if (!opts.surrogate_subset.empty()) {
    fp << ",subset=";
    for (std::size_t i = 0; i < opts.surrogate_subset.size(); ++i)
      fp << (i ? "+" : "") << "s" << (opts.surrogate_subset[i] + 1);
  }
  if (set.treated.ridge_fallback || set.control.ridge_fallback)
    fp << ",ridge_fallback=1";
  if (set.treated.forced_elastic_net || set.control.forced_elastic_net)
    fp << ",forced_elastic_net=1";
  fp << ")";
  set.fingerprint = fp.str();
  return set;
}

EffectTrajectory forecast_linear_surrogate(const SurrogateModelSet& models,
                                           const PanelDataset& ds) {
  const int te = ds.window().t_experimental;
  const int t_total = ds.window().t_total;
  if (te - 1 != models.window_span)
    throw EstimationError("model window does not match dataset window");

  EffectTrajectory traj;
  traj.t_experimental = te;
  traj.estimator = "lsm";
  traj.options_fingerprint = models.fingerprint;
  traj.estimates = observed_effects(ds, te);
  traj.estimates.resize(t_total, 0.0);

  const int n_vars = models.n_vars;
  const bool cov = models.options.use_covariates;

  struct ArmState {
    const ArmLinearModel* model;
    Eigen::MatrixXd window;      // n x (n_vars * span), slides forward
    Eigen::MatrixXd covariates;  // fixed columns
    double last_y_mean = 0.0;
  };

  auto init_arm = [&](int arm_label, const ArmLinearModel& model) {
    ArmBlocks blocks(ds, arm_label, models.options.surrogate_subset);
    ArmState st;
    st.model = &model;
    st.window = stack_window(blocks, 2, te, false);
    st.covariates = blocks.covariates();
    return st;
  };
  ArmState arms[2] = {init_arm(0, models.control), init_arm(1, models.treated)};

  for (int t = te + 1; t <= t_total; ++t) {
    for (ArmState& st : arms) {
      Eigen::MatrixXd pred =
          (st.window * st.model->coef.topRows(st.window.cols())).rowwise() +
          st.model->intercept;
      if (cov && st.covariates.cols() > 0)
        pred.noalias() += st.covariates * st.model->coef.bottomRows(st.covariates.cols());
      st.last_y_mean = pred.col(0).mean();
      if (models.window_span > 1) {
        const long keep = static_cast<long>(models.window_span - 1) * n_vars;
        st.window.leftCols(keep) = st.window.rightCols(keep).eval();
        st.window.rightCols(n_vars) = pred;
      } else {
        st.window = pred;
      }
    }
    traj.estimates[t - 1] = arms[1].last_y_mean - arms[0].last_y_mean;
  }
  return traj;
}

EffectTrajectory estimate_lsm(const PanelDataset& ds,
                              const LinearSurrogateOptions& opts) {
  return forecast_linear_surrogate(fit_linear_surrogate(ds, opts), ds);
}

}  // namespace longterm
