#pragma once

#include <span>
#include <vector>

#include "longterm/numerics/linreg.hpp"

namespace longterm {

// Outcome of a hypothesis test. `degenerate` marks cases where the statistic
// is undefined (e.g. both samples have zero variance); such results carry
// statistic 0 and p-value 1.
struct TestResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  bool degenerate = false;

  bool reject_at(double level) const { return !degenerate && p_value < level; }
};

// Welch two-sample t-test with Welch-Satterthwaite degrees of freedom,
// two-sided p-value.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// t-test on a single OLS coefficient (H0: beta_j = 0).
TestResult coefficient_t_test(const LinearFit& fit, int index);

// Chi-square goodness of fit of observed counts against expected counts,
// df = #cells - 1.
TestResult chi_square_gof(std::span<const double> observed,
                          std::span<const double> expected);

double sample_mean(std::span<const double> v);
// Unbiased (n-1) variance.
double sample_variance(std::span<const double> v);

}  // namespace longterm
