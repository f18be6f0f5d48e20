#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace longterm {

// Per-period treatment-effect estimates over periods 1..T. Periods up to
// t_experimental are observed arm-mean differences; later periods are the
// estimator's extrapolation. Confidence bands, when attached by the
// inference layer, are NaN on periods they do not cover.
struct EffectTrajectory {
  int t_experimental = 0;
  std::vector<double> estimates;  // index t-1 holds period t
  std::string estimator;
  std::string options_fingerprint;
  std::vector<double> lower;  // empty or same length as estimates
  std::vector<double> upper;

  int t_total() const { return static_cast<int>(estimates.size()); }
  bool observed(int period) const { return period <= t_experimental; }
  double at(int period) const { return estimates[period - 1]; }

  std::vector<double> future_estimates() const {
    return {estimates.begin() + t_experimental, estimates.end()};
  }
};

// `truth` may be a full trajectory or a plain per-period curve.
struct Metrics {
  double bias_abs = 0.0;     // mean_t |tau_hat_t - tau_t| over future periods
  double bias_signed = 0.0;  // mean_t (tau_hat_t - tau_t)
  double mse = 0.0;          // over replicas x future periods when replicas exist
  bool mse_from_replicas = false;
};

Metrics compute_metrics(const EffectTrajectory& est, const std::vector<double>& truth,
                        const std::vector<EffectTrajectory>* replicas = nullptr);

// CSV with columns: period, estimate, provenance, lower, upper.
std::string trajectory_csv(const EffectTrajectory& t);

}  // namespace longterm
