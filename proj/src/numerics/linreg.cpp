#include "longterm/numerics/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace longterm {

namespace {

std::string describe_columns(const std::vector<int>& cols) {
  std::ostringstream os;
  os << "singular design, collinear column set {";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) os << ", ";
    os << cols[i];
  }
  os << "}";
  return os.str();
}

// Centered, optionally weighted copy of the problem. Centering implements
// the internal intercept.
struct CenteredProblem {
  Matrix x;
  Vector y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

CenteredProblem center(const Matrix& design, const Vector& target,
                       const Vector* weights) {
  CenteredProblem p;
  if (weights == nullptr) {
    p.x_mean = design.colwise().mean();
    p.y_mean = target.mean();
    p.x = design.rowwise() - p.x_mean;
    p.y = target.array() - p.y_mean;
  } else {
    const double wsum = weights->sum();
    p.x_mean = (weights->transpose() * design) / wsum;
    p.y_mean = weights->dot(target) / wsum;
    p.x = design.rowwise() - p.x_mean;
    p.y = target.array() - p.y_mean;
    const Vector sw = weights->array().sqrt();
    p.x.array().colwise() *= sw.array();
    p.y.array() *= sw.array();
  }
  return p;
}

}  // namespace

SingularDesignError::SingularDesignError(std::vector<int> cols)
    : std::runtime_error(describe_columns(cols)), columns(std::move(cols)) {}

LinearFit ols_fit(const Matrix& design, const Vector& target, const Vector* weights) {
  const long n = design.rows();
  const long p = design.cols();
  if (target.size() != n) throw std::invalid_argument("ols_fit: size mismatch");
  if (n <= p) throw std::invalid_argument("ols_fit: need N > P");

  CenteredProblem c = center(design, target, weights);

  Eigen::ColPivHouseholderQR<Matrix> qr(c.x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // Report the pivoted-away columns; those are the ones in the span of the
    // columns ahead of them.
    std::vector<int> bad;
    const auto& perm = qr.colsPermutation().indices();
    for (long i = qr.rank(); i < p; ++i) bad.push_back(perm[i]);
    std::sort(bad.begin(), bad.end());
    throw SingularDesignError(bad);
  }

  LinearFit fit;
  fit.coefficients = qr.solve(c.y);
  fit.intercept = c.y_mean - c.x_mean.dot(fit.coefficients.transpose());
  fit.n_observations = n;

  const Vector resid = c.y - c.x * fit.coefficients;
  const double rss = resid.squaredNorm();
  const double dof = static_cast<double>(n - p - 1);
  fit.residual_variance = dof > 0 ? rss / dof : 0.0;

  // (X'X)^-1 from the QR factors of the centered design.
  const Matrix r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Matrix rinv = r.inverse();
  Matrix xtx_inv = rinv * rinv.transpose();
  xtx_inv = qr.colsPermutation() * xtx_inv * qr.colsPermutation().transpose();
  Vector se(p);
  for (long j = 0; j < p; ++j)
    se[j] = std::sqrt(std::max(0.0, fit.residual_variance * xtx_inv(j, j)));
  fit.coefficient_standard_errors = se;
  return fit;
}

LinearFit ridge_fit(const Matrix& design, const Vector& target, double lambda) {
  const long n = design.rows();
  const long p = design.cols();
  if (target.size() != n) throw std::invalid_argument("ridge_fit: size mismatch");

  CenteredProblem c = center(design, target, nullptr);
  Matrix gram = c.x.transpose() * c.x;
  gram.diagonal().array() += lambda;
  LinearFit fit;
  fit.coefficients = gram.ldlt().solve(c.x.transpose() * c.y);
  fit.intercept = c.y_mean - c.x_mean.dot(fit.coefficients.transpose());
  fit.n_observations = n;
  const double rss = (c.y - c.x * fit.coefficients).squaredNorm();
  const double dof = static_cast<double>(n - p - 1);
  fit.residual_variance = dof > 0 ? rss / dof : 0.0;
  return fit;
}

LinearFit elastic_net_fit(const Matrix& design, const Vector& target,
                          double penalty_weight, double l1_ratio,
                          std::vector<double>* objective_trace) {
  if (penalty_weight < 0.0)
    throw std::invalid_argument("elastic_net_fit: penalty_weight must be >= 0");
  if (l1_ratio < 0.0 || l1_ratio > 1.0)
    throw std::invalid_argument("elastic_net_fit: l1_ratio must be in [0,1]");
  const long n = design.rows();
  const long p = design.cols();
  if (target.size() != n) throw std::invalid_argument("elastic_net_fit: size mismatch");

  // Standardize columns; constant columns get scale 1 and stay at zero.
  const Eigen::RowVectorXd mu = design.colwise().mean();
  Matrix x = design.rowwise() - mu;
  Eigen::RowVectorXd scale(p);
  for (long j = 0; j < p; ++j) {
    const double s = std::sqrt(x.col(j).squaredNorm() / n);
    scale[j] = s > 0 ? s : 1.0;
    x.col(j) /= scale[j];
  }
  const double y_mean = target.mean();
  Vector y = target.array() - y_mean;

  const double lam_l1 = penalty_weight * l1_ratio;
  const double lam_l2 = penalty_weight * (1.0 - l1_ratio);

  Vector beta = Vector::Zero(p);
  Vector resid = y;

  constexpr int kMaxSweeps = 10000;
  constexpr double kRelTol = 1e-7;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (long j = 0; j < p; ++j) {
      const double bj = beta[j];
      // rho = (1/n) x_j . (resid + x_j * bj); columns have unit second moment.
      const double rho = x.col(j).dot(resid) / n + bj;
      double bnew;
      const double soft = std::fabs(rho) - lam_l1;
      if (soft <= 0.0) {
        bnew = 0.0;
      } else {
        bnew = std::copysign(soft, rho) / (1.0 + lam_l2);
      }
      if (bnew != bj) {
        resid -= (bnew - bj) * x.col(j);
        max_delta = std::max(max_delta, std::fabs(bnew - bj));
        beta[j] = bnew;
      }
    }
    if (objective_trace != nullptr) {
      objective_trace->push_back(resid.squaredNorm() / (2.0 * n) +
                                 lam_l1 * beta.lpNorm<1>() +
                                 0.5 * lam_l2 * beta.squaredNorm());
    }
    // Coefficient-level stopping rule: linear convergence of the sweep map
    // leaves the solution within O(max_delta) of the optimum.
    if (max_delta <= kRelTol * std::max(1.0, beta.cwiseAbs().maxCoeff())) break;
  }
  if (sweep == kMaxSweeps)
    throw ConvergenceError("elastic_net_fit: coordinate descent did not converge", sweep);

  LinearFit fit;
  fit.coefficients = Vector(p);
  for (long j = 0; j < p; ++j) fit.coefficients[j] = beta[j] / scale[j];
  fit.intercept = y_mean - mu.dot(fit.coefficients.transpose());
  fit.n_observations = n;
  const double dof = static_cast<double>(n - p - 1);
  fit.residual_variance = dof > 0 ? resid.squaredNorm() / dof : 0.0;
  return fit;
}

ElasticNetSelection tune_elastic_net(const Matrix& design, const Vector& target,
                                     int grid_size, int folds) {
  if (grid_size < 2) throw std::invalid_argument("tune_elastic_net: grid_size >= 2");
  if (folds < 2) throw std::invalid_argument("tune_elastic_net: folds >= 2");
  const long n = design.rows();
  if (n < folds) throw std::invalid_argument("tune_elastic_net: N < folds");

  // Contiguous fold slices; deterministic.
  std::vector<long> fold_of(n);
  for (long i = 0; i < n; ++i) fold_of[i] = (i * folds) / n;

  auto grid_value = [&](int g) { return static_cast<double>(g) / (grid_size - 1); };

  double best_mse = std::numeric_limits<double>::infinity();
  double best_pen = 0.0, best_l1 = 0.0;
  for (int gi = 0; gi < grid_size; ++gi) {
    const double l1 = grid_value(gi);
    for (int gj = 0; gj < grid_size; ++gj) {
      const double pen = grid_value(gj);
      double sse = 0.0;
      long cnt = 0;
      for (int f = 0; f < folds; ++f) {
        std::vector<long> tr, te;
        for (long i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
        if (tr.empty() || te.empty()) continue;
        Matrix xtr(tr.size(), design.cols());
        Vector ytr(tr.size());
        for (std::size_t i = 0; i < tr.size(); ++i) {
          xtr.row(i) = design.row(tr[i]);
          ytr[i] = target[tr[i]];
        }
        const LinearFit fit = elastic_net_fit(xtr, ytr, pen, l1);
        for (long i : te) {
          const double e = target[i] - fit.predict(design.row(i));
          sse += e * e;
        }
        cnt += static_cast<long>(te.size());
      }
      const double mse = sse / cnt;
      if (mse < best_mse) {
        best_mse = mse;
        best_pen = pen;
        best_l1 = l1;
      }
    }
  }

  ElasticNetSelection sel;
  sel.penalty_weight = best_pen;
  sel.l1_ratio = best_l1;
  sel.fit = elastic_net_fit(design, target, best_pen, best_l1);
  return sel;
}

}  // namespace longterm
