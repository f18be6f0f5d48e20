#pragma once

#include <string>
#include <vector>

#include "longterm/estimators/binning.hpp"
#include "longterm/inference.hpp"
#include "longterm/numerics/rng.hpp"
#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

// Per-arm summary of the matched cross-period comparability tests.
struct StratumTestSummary {
  int arm = 0;  // 0 control, 1 treatment
  int t = 0;
  int t_prime = 0;
  int delta = 0;
  long n_tests = 0;
  long n_p_below_10 = 0;
  long n_p_below_05 = 0;
  long n_excluded_small = 0;  // occupied cells skipped for <2 obs on a side

  double frac_p10() const {
    return n_tests ? static_cast<double>(n_p_below_10) / n_tests : 0.0;
  }
  double frac_p05() const {
    return n_tests ? static_cast<double>(n_p_below_05) / n_tests : 0.0;
  }
};

struct ParallelTrendsResult {
  int t = 0;
  int t_prime = 0;
  int delta = 0;
  double beta3_hat = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  long matched_pairs_treated = 0;
  long matched_pairs_control = 0;
};

struct SensitivityPoint {
  double parameter = 0.0;  // theta, or ignored for subset curves
  std::string label;
  double bias_abs = 0.0;
  double rmse = 0.0;
};

struct SensitivityCurve {
  std::string kind;  // "omitted_surrogate" or "surrogate_subsets"
  std::vector<SensitivityPoint> points;
};

// Direct test of outcome-law time-homogeneity: within each arm, pools Y at
// period t against Y at period t' across cells matched exactly on the binned
// lag-delta surrogates, Welch test per occupied cell, cells without
// cross-period support excluded.
std::vector<StratumTestSummary> comparability_test(const PanelDataset& ds, int t,
                                                   int t_prime, int delta,
                                                   const QuantileBinning& binning);

// Difference-in-differences regression on exact-matched pairs; tests the
// arm-by-period interaction coefficient.
ParallelTrendsResult parallel_trends_test(const PanelDataset& ds, int t, int t_prime,
                                          int delta, const QuantileBinning& binning,
                                          RandomStream stream, double level = 0.05);

// Adds a synthetic omitted-surrogate path theta * zeta to treated outcomes
// (zeta ~ N(0, v), v = average per-period outcome variance over the
// experimental window) and tracks estimator degradation against the
// unperturbed truth.
SensitivityCurve sensitivity_omitted_surrogate(const PanelDataset& ds,
                                               const EstimatorFn& est,
                                               const std::vector<double>& truth,
                                               const std::vector<double>& theta_grid,
                                               RandomStream stream);

// Re-runs the estimator restricted to each surrogate subset (outcome always
// kept in the lag stack).
SensitivityCurve sensitivity_surrogate_subsets(
    const PanelDataset& ds,
    const std::function<EffectTrajectory(const PanelDataset&, const std::vector<int>&,
                                         RandomStream&)>& est,
    const std::vector<double>& truth,
    const std::vector<std::vector<int>>& subsets, RandomStream stream);

// Validation CSV, one summary row per (arm, period pair):
// group,t,t_prime,n_tests,n_p10,n_p05,pct10,pct05
std::string comparability_csv(const std::vector<StratumTestSummary>& rows);

}  // namespace longterm
