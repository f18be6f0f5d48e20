#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "longterm/estimators/binning.hpp"
#include "longterm/numerics/rng.hpp"
#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

enum class ZeroSupportPolicy { abort, nearest_populated };

// Empirical transition distributions and conditional outcome means on the
// discretized surrogate state space, one per (arm, interval length). States
// are composite bin indices; transitions condition on the period-0 state per
// the naive plug-in estimators.
struct DiscreteKernel {
  struct Transition {
    std::vector<std::int64_t> next;    // successor states
    std::vector<double> probability;   // sums to 1
  };
  // transition[delta] : state -> empirical distribution of the state delta
  // periods later under this arm's assignment block.
  std::map<int, std::map<std::int64_t, Transition>> transitions;
  // outcome_mean[delta] : state -> mean outcome delta periods later.
  std::map<int, std::map<std::int64_t, double>> outcome_means;
};

struct DiscreteOptions {
  int bins = 5;
  long mc_draws = 10000;
  ZeroSupportPolicy zero_support = ZeroSupportPolicy::abort;
};

DiscreteKernel build_discrete_kernel(const PanelDataset& ds, int arm,
                                     const StateIndexer& states,
                                     const std::vector<int>& deltas);

// Interval schedule for horizon `t`: equal blocks of length T_E with a
// shorter final block, so every interval satisfies delta <= T_E.
std::vector<int> interval_schedule(int horizon, int t_experimental);

// Plug-in estimator of the longitudinal surrogate model: per arm, Monte-Carlo
// trajectories through the empirical transition chain with the conditional
// outcome mean applied on the final interval.
EffectTrajectory estimate_longitudinal_discrete(const PanelDataset& ds,
                                                const DiscreteOptions& opts,
                                                RandomStream& stream);

}  // namespace longterm
