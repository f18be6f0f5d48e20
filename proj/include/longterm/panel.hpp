#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longterm/numerics/stat_tests.hpp"

namespace longterm {

// Time layout of an experiment panel. Periods are indexed so that period 0
// carries the pre-treatment surrogates, periods 1..t_experimental are the
// observed experimental periods and periods t_experimental+1..t_total are the
// future horizon. An optional run of all-control observational periods
// (periods -t_observational+1 .. 0, used only by the linear additive
// estimator) may precede the experiment.
struct ExperimentWindow {
  int t_experimental = 0;  // T_E
  int t_total = 0;         // T
  int t_observational = 0; // leading all-control periods (0 for plain panels)

  int t_future() const { return t_total - t_experimental; }
  // Index of the period-`p` row inside per-unit storage.
  int row(int period) const { return period + t_observational; }
  int n_rows() const { return t_total + t_observational + 1; }
  int first_period() const { return -t_observational; }

  void validate() const;
};

// One row per (unit, period), long format, as read from CSV.
struct ColumnSpec {
  int d_surrogates = 0;
  int r_covariates = 0;
  ExperimentWindow window;
};

struct ColumnNames {
  std::vector<std::string> surrogates;  // s1..sD
  std::vector<std::string> covariates;  // x1..xR
  std::string outcome = "y";
};

// Immutable after load; safe for shared reads from parallel workers.
class PanelDataset {
 public:
  PanelDataset(ExperimentWindow window, int d_surrogates, int r_covariates,
               std::size_t n_units);

  const ExperimentWindow& window() const { return window_; }
  int d_surrogates() const { return d_; }
  int r_covariates() const { return r_; }
  std::size_t n_units() const { return ids_.size(); }

  const std::string& unit_id(std::size_t i) const { return ids_[i]; }
  int arm(std::size_t i) const { return arms_[i]; }
  std::size_t n_treated() const { return n_treated_; }
  std::size_t n_control() const { return n_units() - n_treated_; }

  double surrogate(std::size_t i, int period, int d) const {
    return surrogates_[(i * window_.n_rows() + window_.row(period)) * d_ + d];
  }
  // NaN when unobserved.
  double outcome(std::size_t i, int period) const {
    return outcomes_[i * window_.n_rows() + window_.row(period)];
  }
  bool outcome_observed(std::size_t i, int period) const {
    return !std::isnan(outcome(i, period));
  }
  double covariate(std::size_t i, int r) const { return covariates_[i * r_ + r]; }

  bool has_future_truth() const { return has_future_truth_; }

  ColumnNames& column_names() { return names_; }
  const ColumnNames& column_names() const { return names_; }

  // Mutation is confined to construction; loaders and generators fill rows
  // then call finalize() which checks the dataset invariants.
  void set_unit(std::size_t i, std::string id, int arm);
  void set_surrogate(std::size_t i, int period, int d, double v) {
    surrogates_[(i * window_.n_rows() + window_.row(period)) * d_ + d] = v;
  }
  void set_outcome(std::size_t i, int period, double v) {
    outcomes_[i * window_.n_rows() + window_.row(period)] = v;
  }
  void set_covariate(std::size_t i, int r, double v) { covariates_[i * r_ + r] = v; }
  void finalize();

  // All unit indices of one arm.
  const std::vector<std::uint32_t>& arm_units(int arm) const {
    return arm == 1 ? treated_units_ : control_units_;
  }

 private:
  ExperimentWindow window_;
  int d_ = 0;
  int r_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> arms_;
  std::vector<double> surrogates_;
  std::vector<double> outcomes_;
  std::vector<double> covariates_;
  std::vector<std::uint32_t> treated_units_;
  std::vector<std::uint32_t> control_units_;
  std::size_t n_treated_ = 0;
  bool has_future_truth_ = false;
  ColumnNames names_;
};

struct VariableTest {
  std::string name;
  TestResult result;
  bool degenerate = false;
};

struct BalanceReport {
  double srm_statistic = 0.0;
  double srm_p = 1.0;
  std::vector<VariableTest> pretreatment_surrogates;
  std::vector<VariableTest> covariates;
};

// CSV ingestion. Long format with header:
//   unit_id,period,arm,y,s1..sD,x1..xR
// `y` must be empty at the first panel period, present for observed periods,
// and may carry ground truth for future periods. Covariates repeat per row
// and must be constant within a unit.
PanelDataset load_panel(const std::string& path, const ColumnSpec& spec);
void save_panel(const PanelDataset& ds, const std::string& path);

// Sample-ratio-mismatch chi-square test of arm counts against the design
// fraction of treated units.
TestResult srm_test(const PanelDataset& ds, double expected_treated_fraction);

// Welch t-tests comparing arms on every period-0 surrogate and covariate.
BalanceReport pretreatment_balance(const PanelDataset& ds,
                                   double expected_treated_fraction = 0.5);

// Per-period difference in arm means of the observed outcome, periods
// 1..through (through <= T_E).
std::vector<double> observed_effects(const PanelDataset& ds, int through);

}  // namespace longterm
