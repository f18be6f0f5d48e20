#include "longterm/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "longterm/errors.hpp"
#include "longterm/numerics/linreg.hpp"
#include "longterm/numerics/stat_tests.hpp"

namespace longterm {

namespace {

void check_periods(const PanelDataset& ds, int t, int t_prime, int delta) {
  if (t == t_prime) throw ConfigError("validation: t and t' must differ");
  if (delta < 1) throw ConfigError("validation: delta must be >= 1");
  const int first = ds.window().first_period();
  const int te = ds.window().t_experimental;
  for (int p : {t, t_prime}) {
    if (p - delta < first || p > te || p <= first)
      throw ConfigError("validation: need first <= t-delta and t <= T_E");
  }
}

}  // namespace

std::vector<StratumTestSummary> comparability_test(const PanelDataset& ds, int t,
                                                   int t_prime, int delta,
                                                   const QuantileBinning& binning) {
  check_periods(ds, t, t_prime, delta);
  const StateIndexer ix(ds, binning);

  std::vector<StratumTestSummary> out;
  bool any_cell = false;
  for (int arm = 0; arm <= 1; ++arm) {
    StratumTestSummary summary;
    summary.arm = arm;
    summary.t = t;
    summary.t_prime = t_prime;
    summary.delta = delta;

    std::unordered_map<std::int64_t, std::pair<std::vector<double>, std::vector<double>>>
        cells;
    for (std::uint32_t i : ds.arm_units(arm)) {
      cells[ix.state(ds, i, t - delta)].first.push_back(ds.outcome(i, t));
      cells[ix.state(ds, i, t_prime - delta)].second.push_back(ds.outcome(i, t_prime));
    }
    for (const auto& [cell, pools] : cells) {
      const auto& [a, b] = pools;
      if (a.empty() || b.empty()) continue;  // no cross-period match
      any_cell = true;
      if (a.size() < 2 || b.size() < 2) {
        ++summary.n_excluded_small;
        continue;
      }
      const TestResult r = welch_t_test(a, b);
      if (r.degenerate) continue;
      ++summary.n_tests;
      if (r.p_value < 0.10) ++summary.n_p_below_10;
      if (r.p_value < 0.05) ++summary.n_p_below_05;
    }
    out.push_back(summary);
  }
  if (!any_cell)
    throw DiagnosticError(
        "comparability_test: no cell has observations in both periods; "
        "try coarser binning");
  return out;
}

ParallelTrendsResult parallel_trends_test(const PanelDataset& ds, int t, int t_prime,
                                          int delta, const QuantileBinning& binning,
                                          RandomStream stream, double level) {
  check_periods(ds, t, t_prime, delta);
  const StateIndexer ix(ds, binning);

  ParallelTrendsResult result;
  result.t = t;
  result.t_prime = t_prime;
  result.delta = delta;

  // Rows of the 2x2 interaction regression, two per matched pair.
  std::vector<double> y;
  std::vector<std::array<double, 3>> x;  // [treated, is_t, treated*is_t]

  for (int arm = 0; arm <= 1; ++arm) {
    // Pool of period-t' observations per cell, in canonical unit-id order so
    // the seeded match draw does not depend on row ordering.
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> pool;
    for (std::uint32_t i : ds.arm_units(arm))
      pool[ix.state(ds, i, t_prime - delta)].push_back(i);
    for (auto& [cell, members] : pool)
      std::sort(members.begin(), members.end(),
                [&ds](std::uint32_t a, std::uint32_t b) {
                  return ds.unit_id(a) < ds.unit_id(b);
                });

    std::vector<std::pair<std::string, std::uint32_t>> ordered;
    for (std::uint32_t i : ds.arm_units(arm)) ordered.emplace_back(ds.unit_id(i), i);
    std::sort(ordered.begin(), ordered.end());

    long pairs = 0;
    for (const auto& entry : ordered) {
      const std::uint32_t i = entry.second;
      const auto it = pool.find(ix.state(ds, i, t - delta));
      if (it == pool.end() || it->second.empty()) continue;
      // One match from period t' is drawn at random.
      const std::uint32_t j =
          it->second[stream.uniform_int(it->second.size())];
      y.push_back(ds.outcome(i, t));
      x.push_back({static_cast<double>(arm), 1.0, static_cast<double>(arm)});
      y.push_back(ds.outcome(j, t_prime));
      x.push_back({static_cast<double>(arm), 0.0, 0.0});
      ++pairs;
    }
    (arm == 1 ? result.matched_pairs_treated : result.matched_pairs_control) = pairs;
  }
  if (result.matched_pairs_treated == 0 || result.matched_pairs_control == 0)
    throw DiagnosticError("parallel_trends_test: an arm has no matched pairs");

  Matrix design(static_cast<long>(x.size()), 3);
  Vector target(static_cast<long>(y.size()));
  for (std::size_t r = 0; r < x.size(); ++r) {
    design(r, 0) = x[r][0];
    design(r, 1) = x[r][1];
    design(r, 2) = x[r][2];
    target[r] = y[r];
  }
  const LinearFit fit = ols_fit(design, target);
  const TestResult test = coefficient_t_test(fit, 2);
  result.beta3_hat = fit.coefficients[2];
  result.t_statistic = test.statistic;
  result.p_value = test.p_value;
  result.reject = test.reject_at(level);
  return result;
}

SensitivityCurve sensitivity_omitted_surrogate(const PanelDataset& ds,
                                               const EstimatorFn& est,
                                               const std::vector<double>& truth,
                                               const std::vector<double>& theta_grid,
                                               RandomStream stream) {
  if (std::find(theta_grid.begin(), theta_grid.end(), 0.0) == theta_grid.end())
    throw ConfigError("sensitivity_omitted_surrogate: grid must contain 0");

  const int te = ds.window().t_experimental;
  // Average per-period pooled outcome variance over the experimental window.
  double v = 0.0;
  std::vector<double> col(ds.n_units());
  for (int p = 1; p <= te; ++p) {
    for (std::size_t i = 0; i < ds.n_units(); ++i) col[i] = ds.outcome(i, p);
    v += sample_variance(col);
  }
  v /= te;
  const double sd = std::sqrt(v);

  // One zeta draw per (unit, experimental period), shared across the grid so
  // that theta is the only thing varying.
  RandomStream zeta_stream = stream.spawn(0);
  std::vector<double> zeta(ds.n_units() * te);
  for (auto& z : zeta) z = zeta_stream.normal(0.0, sd);

  SensitivityCurve curve;
  curve.kind = "omitted_surrogate";
  for (double theta : theta_grid) {
    PanelDataset perturbed = relabel_arms(ds, ds.arm_units(1));
    if (theta != 0.0) {
      for (std::uint32_t i : ds.arm_units(1))
        for (int p = 1; p <= te; ++p)
          perturbed.set_outcome(i, p,
                                ds.outcome(i, p) + theta * zeta[i * te + (p - 1)]);
    }
    RandomStream est_stream = stream.spawn(0xabcdULL);
    const EffectTrajectory traj = est(perturbed, est_stream);
    const Metrics m = compute_metrics(traj, truth);
    SensitivityPoint pt;
    pt.parameter = theta;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "theta=%g", theta);
    pt.label = buf;
    pt.bias_abs = m.bias_abs;
    pt.rmse = std::sqrt(m.mse);
    curve.points.push_back(pt);
  }
  return curve;
}

SensitivityCurve sensitivity_surrogate_subsets(
    const PanelDataset& ds,
    const std::function<EffectTrajectory(const PanelDataset&, const std::vector<int>&,
                                         RandomStream&)>& est,
    const std::vector<double>& truth,
    const std::vector<std::vector<int>>& subsets, RandomStream stream) {
  bool has_full = false;
  for (const auto& s : subsets) {
    if (s.empty())
      throw ConfigError("sensitivity_surrogate_subsets: empty subset");
    for (int d : s)
      if (d < 0 || d >= ds.d_surrogates())
        throw ConfigError("sensitivity_surrogate_subsets: unknown surrogate column s" +
                          std::to_string(d + 1));
    if (static_cast<int>(s.size()) == ds.d_surrogates()) has_full = true;
  }
  if (!has_full)
    throw ConfigError("sensitivity_surrogate_subsets: the full set must be included");

  SensitivityCurve curve;
  curve.kind = "surrogate_subsets";
  std::uint64_t idx = 0;
  for (const auto& subset : subsets) {
    RandomStream est_stream = stream.spawn(idx++);
    const EffectTrajectory traj = est(ds, subset, est_stream);
    const Metrics m = compute_metrics(traj, truth);
    SensitivityPoint pt;
    pt.parameter = static_cast<double>(subset.size());
    std::ostringstream label;
    for (std::size_t i = 0; i < subset.size(); ++i)
      label << (i ? "+" : "") << "s" << (subset[i] + 1);
    pt.label = label.str();
    pt.bias_abs = m.bias_abs;
    pt.rmse = std::sqrt(m.mse);
    curve.points.push_back(pt);
  }
  return curve;
}

std::string comparability_csv(const std::vector<StratumTestSummary>& rows) {
  std::ostringstream os;
  os << "group,t,t_prime,n_tests,n_p10,n_p05,pct10,pct05\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f", 100.0 * r.frac_p10(),
                  100.0 * r.frac_p05());
    os << (r.arm == 1 ? "treatment" : "control") << ',' << r.t << ',' << r.t_prime
       << ',' << r.n_tests << ',' << r.n_p_below_10 << ',' << r.n_p_below_05 << ','
       << buf << '\n';
  }
  return os.str();
}

}  // namespace longterm
