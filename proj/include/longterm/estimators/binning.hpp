#pragma once

#include <cstdint>
#include <vector>

#include "longterm/panel.hpp"

namespace longterm {

// Per-dimension quantile bins shared by the discrete estimators and the
// matching-based validation tests. Edges are computed from the pooled
// experimental-window values of both arms (periods 0..T_E), so bin labels
// mean the same thing everywhere in a run.
class QuantileBinning {
 public:
  // `values_per_dim[d]` holds the pool used to cut dimension d.
  QuantileBinning(std::vector<std::vector<double>> values_per_dim, int bins);

  int bins() const { return bins_; }
  int dims() const { return static_cast<int>(edges_.size()); }
  int assign(int dim, double value) const;

  // Composite cell index over all surrogate dims for a unit-period.
  std::int64_t cell(const PanelDataset& ds, std::size_t unit, int period) const;
  std::int64_t n_cells() const;

 private:
  std::vector<std::vector<double>> edges_;
  int bins_;
};

// Bins cut on surrogate values pooled over arms and periods 0..T_E.
QuantileBinning make_surrogate_binning(const PanelDataset& ds, int bins);

// Composite state over binned surrogates at a period plus the unit's binned
// covariate cell. The discrete estimators and the matching-based tests share
// this, so a state id means the same thing everywhere.
class StateIndexer {
 public:
  StateIndexer(const PanelDataset& ds, const QuantileBinning& surrogate_bins);

  std::int64_t state(const PanelDataset& ds, std::size_t unit, int period) const;
  // Bin coordinates: surrogate dims first, then covariate dims.
  std::vector<int> decode(std::int64_t id) const;
  long l1_distance(std::int64_t a, std::int64_t b) const;

 private:
  const QuantileBinning* bins_;
  std::vector<std::vector<double>> cov_edges_;
};

}  // namespace longterm
