#include "longterm/inference.hpp"

#include <algorithm>
#include <cmath>

#include "longterm/errors.hpp"
#include "longterm/numerics/special.hpp"
#include "longterm/parallel.hpp"

namespace longterm {

namespace {

PanelDataset copy_structure(const PanelDataset& ds, std::size_t n_units) {
  return PanelDataset(ds.window(), ds.d_surrogates(), ds.r_covariates(), n_units);
}

void copy_unit(const PanelDataset& src, std::size_t from, PanelDataset& dst,
               std::size_t to, const std::string& id, int arm) {
  const auto& w = src.window();
  dst.set_unit(to, id, arm);
  for (int p = w.first_period(); p <= w.t_total; ++p) {
    for (int d = 0; d < src.d_surrogates(); ++d)
      dst.set_surrogate(to, p, d, src.surrogate(from, p, d));
    if (src.outcome_observed(from, p)) dst.set_outcome(to, p, src.outcome(from, p));
  }
  for (int r = 0; r < src.r_covariates(); ++r)
    dst.set_covariate(to, r, src.covariate(from, r));
}

// Type-7 percentile of a sorted vector.
double percentile_sorted(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  return lo + 1 < v.size() ? v[lo] + frac * (v[lo + 1] - v[lo]) : v[lo];
}

int resolve_statistic_period(const PanelDataset& ds, const InferenceOptions& opts) {
  const int period = opts.statistic_period == 0 ? ds.window().t_total
                                                : opts.statistic_period;
  if (period < 1 || period > ds.window().t_total)
    throw ConfigError("inference: statistic period outside 1..T");
  return period;
}

// Runs the estimator on M re-randomized or resampled panels, collecting
// replicate trajectories; index-deterministic regardless of thread count.
struct ReplicateRun {
  std::vector<std::optional<EffectTrajectory>> trajectories;
  long failures = 0;
};

template <typename MakePanel>
ReplicateRun run_replicates(long m, int threads, const EstimatorFn& est,
                            const RandomStream& stream, MakePanel&& make_panel) {
  ReplicateRun run;
  run.trajectories.resize(m);
  std::vector<std::uint8_t> failed(m, 0);
  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t rep) {
    RandomStream label_stream = stream.spawn(2 * rep);
    RandomStream est_stream = stream.spawn(2 * rep + 1);
    try {
      const PanelDataset panel = make_panel(label_stream);
      run.trajectories[rep] = est(panel, est_stream);
    } catch (const std::exception&) {
      failed[rep] = 1;
    }
  });
  for (long i = 0; i < m; ++i) run.failures += failed[i];
  if (run.failures * 20 > m)
    throw InferenceError("more than 5% of replicates failed (" +
                         std::to_string(run.failures) + "/" + std::to_string(m) + ")");
  return run;
}

}  // namespace

PanelDataset relabel_arms(const PanelDataset& ds,
                          const std::vector<std::uint32_t>& treated) {
  std::vector<std::uint8_t> is_treated(ds.n_units(), 0);
  for (std::uint32_t i : treated) is_treated[i] = 1;
  PanelDataset out = copy_structure(ds, ds.n_units());
  for (std::size_t i = 0; i < ds.n_units(); ++i)
    copy_unit(ds, i, out, i, ds.unit_id(i), is_treated[i]);
  out.column_names() = ds.column_names();
  out.finalize();
  return out;
}

PanelDataset swap_arms(const PanelDataset& ds) {
  PanelDataset out = copy_structure(ds, ds.n_units());
  for (std::size_t i = 0; i < ds.n_units(); ++i)
    copy_unit(ds, i, out, i, ds.unit_id(i), 1 - ds.arm(i));
  out.column_names() = ds.column_names();
  out.finalize();
  return out;
}

PermutationResult permutation_test(const PanelDataset& ds, const EstimatorFn& est,
                                   long m, RandomStream stream,
                                   const InferenceOptions& opts) {
  if (m < 1) throw ConfigError("permutation_test: M must be >= 1");
  const int period = resolve_statistic_period(ds, opts);

  RandomStream observed_stream = stream.spawn(0xffffffffULL);
  const EffectTrajectory observed = est(ds, observed_stream);

  const std::size_t n1 = ds.n_treated();
  const ReplicateRun run = run_replicates(
      m, opts.threads, est, stream, [&](RandomStream& labels) {
        return relabel_arms(ds,
                            labels.sample_without_replacement(ds.n_units(), n1));
      });

  PermutationResult result;
  result.requested = m;
  result.failures = run.failures;
  result.observed_statistic = observed.at(period);
  long exceed = 0, used = 0;
  for (const auto& t : run.trajectories) {
    if (!t) continue;
    const double stat = t->at(period);
    result.replicate_statistics.push_back(stat);
    if (std::fabs(stat) > std::fabs(result.observed_statistic)) ++exceed;
    ++used;
  }
  result.p_value = used > 0 ? static_cast<double>(exceed) / used : 1.0;
  return result;
}

CIBand randomization_bootstrap(const PanelDataset& ds, const EstimatorFn& est,
                               long m, RandomStream stream,
                               const InferenceOptions& opts) {
  if (m < 2) throw ConfigError("randomization_bootstrap: M must be >= 2");
  const int t_total = ds.window().t_total;

  RandomStream observed_stream = stream.spawn(0xffffffffULL);
  const EffectTrajectory observed = est(ds, observed_stream);

  const std::size_t n1 = ds.n_treated();
  const ReplicateRun run = run_replicates(
      m, opts.threads, est, stream, [&](RandomStream& labels) {
        return relabel_arms(ds,
                            labels.sample_without_replacement(ds.n_units(), n1));
      });

  CIBand band;
  band.method = CIBand::Method::randomization_bootstrap;
  band.level = opts.level;
  band.lower.resize(t_total);
  band.upper.resize(t_total);

  // z for the two-sided normal band at the requested level.
  double zq = 1.959963984540054;
  if (opts.level != 0.95) {
    // Invert the normal CDF by bisection; exercised rarely.
    double lo = 0.0, hi = 10.0;
    const double target = 0.5 + opts.level / 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < target ? lo : hi) = mid;
    }
    zq = 0.5 * (lo + hi);
  }

  long used = 0;
  std::vector<double> mean(t_total, 0.0), m2(t_total, 0.0);
  for (const auto& t : run.trajectories) {
    if (!t) continue;
    ++used;
    for (int p = 0; p < t_total; ++p) {
      const double x = t->estimates[p];
      const double d = x - mean[p];
      mean[p] += d / used;
      m2[p] += d * (x - mean[p]);
    }
  }
  band.replicas = used;
  band.failures = run.failures;
  if (used < 2) throw InferenceError("randomization_bootstrap: <2 usable replicas");
  for (int p = 0; p < t_total; ++p) {
    const double sd = std::sqrt(m2[p] / (used - 1));
    band.lower[p] = observed.estimates[p] - zq * sd;
    band.upper[p] = observed.estimates[p] + zq * sd;
  }
  band.var_tau_T = m2[t_total - 1] / (used - 1);
  return band;
}

SubsampleBootstrap subsample_bootstrap(const PanelDataset& ds, const EstimatorFn& est,
                                       RandomStream stream,
                                       const InferenceOptions& opts) {
  if (opts.replicas < 2) throw ConfigError("subsample_bootstrap: replicas must be >= 2");
  if (opts.subsample_fraction <= 0.0 || opts.subsample_fraction > 1.0)
    throw ConfigError("subsample_bootstrap: fraction must be in (0,1]");
  const int t_total = ds.window().t_total;

  // Stratified by arm so no replica ends up with an empty arm.
  const auto& treated = ds.arm_units(1);
  const auto& control = ds.arm_units(0);
  const std::size_t k1 = std::max<std::size_t>(
      1, static_cast<std::size_t>(opts.subsample_fraction * treated.size()));
  const std::size_t k0 = std::max<std::size_t>(
      1, static_cast<std::size_t>(opts.subsample_fraction * control.size()));

  auto make_panel = [&](RandomStream& labels) {
    PanelDataset out = copy_structure(ds, k1 + k0);
    std::size_t slot = 0;
    for (std::size_t j = 0; j < k1; ++j, ++slot) {
      const std::uint32_t i = treated[labels.uniform_int(treated.size())];
      copy_unit(ds, i, out, slot, ds.unit_id(i) + "#" + std::to_string(j), 1);
    }
    for (std::size_t j = 0; j < k0; ++j, ++slot) {
      const std::uint32_t i = control[labels.uniform_int(control.size())];
      copy_unit(ds, i, out, slot, ds.unit_id(i) + "#" + std::to_string(j), 0);
    }
    out.column_names() = ds.column_names();
    out.finalize();
    return out;
  };

  const ReplicateRun run =
      run_replicates(opts.replicas, opts.threads, est, stream, make_panel);

  SubsampleBootstrap out;
  out.band.method = CIBand::Method::subsample_bootstrap;
  out.band.level = opts.level;
  out.band.failures = run.failures;
  out.band.lower.resize(t_total);
  out.band.upper.resize(t_total);

  for (const auto& t : run.trajectories)
    if (t) out.replicates.push_back(*t);
  out.band.replicas = static_cast<long>(out.replicates.size());
  if (out.band.replicas < 2)
    throw InferenceError("subsample_bootstrap: <2 usable replicas");

  const double alpha = (1.0 - opts.level) / 2.0;
  std::vector<double> column(out.replicates.size());
  for (int p = 0; p < t_total; ++p) {
    for (std::size_t r = 0; r < out.replicates.size(); ++r)
      column[r] = out.replicates[r].estimates[p];
    std::sort(column.begin(), column.end());
    out.band.lower[p] = percentile_sorted(column, alpha);
    out.band.upper[p] = percentile_sorted(column, 1.0 - alpha);
  }
  {
    double mean = 0.0, m2 = 0.0;
    long n = 0;
    for (const auto& t : out.replicates) {
      const double x = t.estimates[t_total - 1];
      ++n;
      const double d = x - mean;
      mean += d / n;
      m2 += d * (x - mean);
    }
    out.band.var_tau_T = n > 1 ? m2 / (n - 1) : 0.0;
  }
  return out;
}

}  // namespace longterm
