#pragma once

#include <string>
#include <vector>

#include "longterm/estimators/discrete.hpp"
#include "longterm/panel.hpp"

namespace longterm {

struct AdditiveOptions {
  int bins = 5;
  // Breakpoints t_1 < ... < t_K < T; empty = equal blocks of length T_E.
  std::vector<int> breakpoints;
  ZeroSupportPolicy zero_support = ZeroSupportPolicy::abort;
};

struct AdditiveEstimate {
  double tau_T = 0.0;
  // The source model is known to overestimate persistent effects whenever
  // effects are not truly additive; callers should prefer the linear
  // surrogate model unless additivity is credible.
  bool advisory_against_common_use = true;
  std::string schedule;
};

// Plug-in estimator of the linear additive model. Requires a panel with
// all-control observational periods deep enough to estimate the
// consecutive-control index functions. Exact enumeration over the
// discretized state space (no Monte-Carlo).
AdditiveEstimate estimate_linear_additive(const PanelDataset& ds,
                                          const AdditiveOptions& opts = {});

}  // namespace longterm
