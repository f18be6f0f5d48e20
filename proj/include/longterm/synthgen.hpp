#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longterm/panel.hpp"

namespace longterm {

enum class SynthKind {
  stabilized1,
  stabilized2,
  comparability_violation,
  nonlinear,
  no_effect,
};

const char* synth_kind_name(SynthKind k);
SynthKind synth_kind_from_name(const std::string& name);

// Fully parameterized data-generating process. Structural parameters
// (per-dimension means and scales) are drawn once per panel from the seeded
// stream; every surrogate draw is sign-folded so the synthetic metrics stay
// non-negative like the usage counts they stand in for.
struct SynthSpec {
  SynthKind kind = SynthKind::stabilized1;
  long n_per_arm = 100000;
  int t_total = 10;
  int t_experimental = 2;
  int t_observational = 0;
  std::uint64_t seed = 0;
  double gamma = 1.0;  // comparability shock multiplier at period 2 (treated)
  double theta = 1.0;  // exponential magnitude of the nonlinear outcome
  // When set, the treated arm follows the control law exactly and all
  // treatment-side terms are disabled: arms are exchangeable and every
  // per-period effect is 0. Null-calibration suites run on this.
  bool sharp_null = false;

  void validate() const;
  int n_surrogates() const;
};

// Structural parameters realized for one panel; recorded in the sidecar so
// the truth curve can be recomputed independently of the panel draws.
struct DrawnParams {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> weights;
  std::vector<double> kappa;  // treated decay factors; 1 = no decay
  double control_shift = 0.0;
  double outcome_sign = 1.0;
};

struct TruthOracle {
  enum class Method { analytic, monte_carlo };
  Method method = Method::analytic;
  std::vector<double> tau;    // per period 1..T
  std::vector<double> mc_se;  // empty for analytic truth
};

struct SynthPanel {
  PanelDataset panel;
  TruthOracle truth;
  DrawnParams params;
};

// Generates the panel plus its analytic truth curve. `threads` only affects
// wall time; output is chunk-deterministic.
SynthPanel generate(const SynthSpec& spec, int threads = 1);

// Monte-Carlo truth from an independent mega-sample sharing `params` but a
// noise stream disjoint from any panel substream.
TruthOracle mc_truth(const SynthSpec& spec, const DrawnParams& params, long mega_n,
                     int threads = 1);

// Mean of |N(mean, sd^2)| and E[exp(a |N(mean, sd^2)|)]; the closed forms
// behind the analytic truth curves.
double folded_normal_mean(double mean, double sd);
double folded_normal_exp_moment(double a, double mean, double sd);

}  // namespace longterm
