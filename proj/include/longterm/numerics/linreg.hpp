#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace longterm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Result of a linear fit. `coefficients` excludes the intercept, which is
// handled internally by every solver here. Standard errors are only
// populated for ordinary (unregularized) fits.
struct LinearFit {
  double intercept = 0.0;
  Vector coefficients;
  std::optional<Vector> coefficient_standard_errors;
  double residual_variance = 0.0;
  long n_observations = 0;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return intercept + x.dot(coefficients.transpose());
  }
};

// Thrown when an exactly collinear design is handed to ols_fit. Carries the
// offending column indices so callers can decide on a fallback.
struct SingularDesignError : std::runtime_error {
  explicit SingularDesignError(std::vector<int> cols);
  std::vector<int> columns;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const char* what, int iters)
      : std::runtime_error(what), iterations(iters) {}
  int iterations;
};

// Ordinary least squares via column-pivoted QR. `design` must not contain an
// intercept column. Standard errors from sigma^2 (X'X)^-1 with
// sigma^2 = RSS / (N - P - 1).
LinearFit ols_fit(const Matrix& design, const Vector& target,
                  const Vector* weights = nullptr);

// Least squares on the normal equations with an L2 nudge; the fallback used
// by estimators when ols_fit reports a singular design. No standard errors.
LinearFit ridge_fit(const Matrix& design, const Vector& target, double lambda = 1e-8);

// Elastic net by cyclic coordinate descent on internally standardized
// columns, intercept unpenalized. Objective:
//   (1/2N) ||y - b0 - X b||^2 + penalty * (l1_ratio |b|_1 + (1-l1_ratio)/2 |b|_2^2)
// Converges to relative tolerance 1e-7 or throws after 10^4 sweeps.
// Coefficients are returned on the original scale. `objective_trace`, when
// given, receives the penalized objective after every sweep.
LinearFit elastic_net_fit(const Matrix& design, const Vector& target,
                          double penalty_weight, double l1_ratio,
                          std::vector<double>* objective_trace = nullptr);

struct ElasticNetSelection {
  double penalty_weight = 0.0;
  double l1_ratio = 0.0;
  LinearFit fit;
};

// Grid search over [0,1] x [0,1] for (penalty_weight, l1_ratio) by K-fold
// cross validation on out-of-fold squared error; refits on all data.
ElasticNetSelection tune_elastic_net(const Matrix& design, const Vector& target,
                                     int grid_size = 100, int folds = 5);

}  // namespace longterm
