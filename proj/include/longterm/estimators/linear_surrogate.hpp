#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

// Fitted per-arm linear maps from a lag-stacked window to the next period's
// variable block. Column 0 of each block is the outcome, so coefficient
// column 0 of `coef` is the surrogate-index fit and the remaining columns
// are the pivot-index fits.
struct ArmLinearModel {
  Eigen::MatrixXd coef;          // (feature width) x n_vars
  Eigen::RowVectorXd intercept;  // n_vars
  bool ridge_fallback = false;
  bool forced_elastic_net = false;
};

struct LinearSurrogateOptions {
  bool use_covariates = false;
  bool elastic_net = false;
  int tune_grid = 10;
  int tune_folds = 5;
  // Restrict the model to these surrogate dims (empty = all). The outcome
  // always stays in the lag stack.
  std::vector<int> surrogate_subset;
};

struct SurrogateModelSet {
  ArmLinearModel treated;
  ArmLinearModel control;
  int n_vars = 0;
  int window_span = 0;  // T_E - 1 lagged periods
  LinearSurrogateOptions options;
  std::string fingerprint;
};

// Per arm, regresses every period-T_E variable on the variables of periods
// 1..T_E-1 (optionally plus covariates). Exactly collinear stacks fall back
// to a 1e-8 ridge on the normal equations; arms with fewer units than
// features are fit with the elastic net instead.
SurrogateModelSet fit_linear_surrogate(const PanelDataset& ds,
                                       const LinearSurrogateOptions& opts = {});

// Slides the lag window over observed data and then over the model's own
// predictions, never reading observations past T_E. Future-period estimates
// are differences of predicted outcome means under the per-arm models.
EffectTrajectory forecast_linear_surrogate(const SurrogateModelSet& models,
                                           const PanelDataset& ds);

// fit + forecast.
EffectTrajectory estimate_lsm(const PanelDataset& ds,
                              const LinearSurrogateOptions& opts = {});

}  // namespace longterm
