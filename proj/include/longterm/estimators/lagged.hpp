#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "longterm/panel.hpp"

namespace longterm {

// Column-compiled view of one arm. Each period block holds the outcome
// followed by the D surrogates, one row per unit; the outcome is carried as
// one of the variables throughout the lag stack.
class ArmBlocks {
 public:
  ArmBlocks(const PanelDataset& ds, int arm,
            const std::vector<int>& surrogate_subset);

  int n_vars() const { return n_vars_; }
  long n_units() const { return static_cast<long>(units_.size()); }
  const std::vector<std::uint32_t>& units() const { return units_; }

  // (n_units x n_vars) block of period `p`; `p` must be >= 1 because the
  // outcome is undefined on the first panel row.
  const Eigen::MatrixXd& block(int period) const { return blocks_.at(period); }
  const Eigen::MatrixXd& covariates() const { return covariates_; }

 private:
  int n_vars_;
  std::vector<std::uint32_t> units_;
  std::vector<Eigen::MatrixXd> blocks_;  // indexed by period, entries 0..T_E (0 unused)
  Eigen::MatrixXd covariates_;
};

// Stacks blocks for periods [from, to] side by side: width = n_vars * (to-from+1).
Eigen::MatrixXd stack_window(const ArmBlocks& arm, int from, int to,
                             bool append_covariates);

}  // namespace longterm
