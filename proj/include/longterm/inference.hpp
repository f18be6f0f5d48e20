#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "longterm/numerics/rng.hpp"
#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

// Any trajectory producer; the stream carries the estimator's own
// randomness (VAR variable choice, Monte-Carlo draws).
using EstimatorFn =
    std::function<EffectTrajectory(const PanelDataset&, RandomStream&)>;

struct PermutationResult {
  double observed_statistic = 0.0;
  std::vector<double> replicate_statistics;
  double p_value = 1.0;
  long requested = 0;
  long failures = 0;
};

struct CIBand {
  enum class Method { randomization_bootstrap, subsample_bootstrap };
  Method method = Method::subsample_bootstrap;
  double level = 0.95;
  long replicas = 0;
  long failures = 0;
  std::vector<double> lower;  // per period 1..T
  std::vector<double> upper;
  double var_tau_T = 0.0;  // sample variance of the final-period statistic
};

struct InferenceOptions {
  long replicas = 100;
  double level = 0.95;
  // Statistic period for the permutation test; 0 = final period T.
  int statistic_period = 0;
  double subsample_fraction = 0.5;
  int threads = 1;
};

// Panel with arm labels replaced (complete re-randomization holding all
// outcomes fixed). `treated` lists the unit indices assigned to treatment.
PanelDataset relabel_arms(const PanelDataset& ds,
                          const std::vector<std::uint32_t>& treated);
// Panel with every arm flipped; estimator outputs negate under this map.
PanelDataset swap_arms(const PanelDataset& ds);

// Sharp-null test: re-randomize arm labels M times with the original arm
// counts, re-estimate, and count replicate statistics that exceed the
// observed one in absolute value.
PermutationResult permutation_test(const PanelDataset& ds, const EstimatorFn& est,
                                   long m, RandomStream stream,
                                   const InferenceOptions& opts = {});

// Label re-randomization variance with normal-approximation bands.
CIBand randomization_bootstrap(const PanelDataset& ds, const EstimatorFn& est,
                               long m, RandomStream stream,
                               const InferenceOptions& opts = {});

struct SubsampleBootstrap {
  CIBand band;
  std::vector<EffectTrajectory> replicates;
};

// Resamples floor(fraction * N_arm) units per arm with replacement, refits
// the estimator, and reports percentile bands per period. The replicate
// trajectories feed the replica-averaged MSE.
SubsampleBootstrap subsample_bootstrap(const PanelDataset& ds, const EstimatorFn& est,
                                       RandomStream stream,
                                       const InferenceOptions& opts = {});

}  // namespace longterm
