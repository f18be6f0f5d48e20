#include "longterm/estimators/lagged.hpp"

#include "longterm/errors.hpp"

namespace longterm {

ArmBlocks::ArmBlocks(const PanelDataset& ds, int arm,
                     const std::vector<int>& surrogate_subset)
    : units_(ds.arm_units(arm)) {
  std::vector<int> dims = surrogate_subset;
  if (dims.empty()) {
    dims.resize(ds.d_surrogates());
    for (int d = 0; d < ds.d_surrogates(); ++d) dims[d] = d;
  } else {
    for (int d : dims) {
      if (d < 0 || d >= ds.d_surrogates())
        throw ConfigError("surrogate subset index out of range: " + std::to_string(d));
    }
  }
  n_vars_ = 1 + static_cast<int>(dims.size());

  const int te = ds.window().t_experimental;
  const long n = n_units();
  blocks_.resize(te + 1);
  for (int p = 1; p <= te; ++p) {
    Eigen::MatrixXd b(n, n_vars_);
    for (long r = 0; r < n; ++r) {
      const std::uint32_t i = units_[r];
      b(r, 0) = ds.outcome(i, p);
      for (std::size_t k = 0; k < dims.size(); ++k)
        b(r, 1 + static_cast<int>(k)) = ds.surrogate(i, p, dims[k]);
    }
    blocks_[p] = std::move(b);
  }
  covariates_.resize(n, ds.r_covariates());
  for (long r = 0; r < n; ++r)
    for (int c = 0; c < ds.r_covariates(); ++c)
      covariates_(r, c) = ds.covariate(units_[r], c);
}

Eigen::MatrixXd stack_window(const ArmBlocks& arm, int from, int to,
                             bool append_covariates) {
  const int n_vars = arm.n_vars();
  const int span = to - from + 1;
  const long n = arm.n_units();
  const long extra = append_covariates ? arm.covariates().cols() : 0;
  Eigen::MatrixXd x(n, static_cast<long>(n_vars) * span + extra);
  for (int p = from; p <= to; ++p)
    x.middleCols(static_cast<long>(p - from) * n_vars, n_vars) = arm.block(p);
  if (append_covariates && extra > 0) x.rightCols(extra) = arm.covariates();
  return x;
}

}  // namespace longterm
