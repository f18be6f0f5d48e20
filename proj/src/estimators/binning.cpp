#include "longterm/estimators/binning.hpp"

#include <algorithm>
#include <stdexcept>

#include "longterm/errors.hpp"

namespace longterm {

QuantileBinning::QuantileBinning(std::vector<std::vector<double>> values_per_dim,
                                 int bins)
    : bins_(bins) {
  if (bins < 2) throw ConfigError("binning: need at least 2 bins");
  edges_.reserve(values_per_dim.size());
  for (auto& pool : values_per_dim) {
    if (pool.empty()) throw ConfigError("binning: empty value pool");
    std::sort(pool.begin(), pool.end());
    std::vector<double> e;
    e.reserve(bins - 1);
    const std::size_t n = pool.size();
    for (int k = 1; k < bins; ++k) {
      // Type-7 quantile at k/bins.
      const double h = (static_cast<double>(n) - 1.0) * k / bins;
      const std::size_t lo = static_cast<std::size_t>(h);
      const double frac = h - static_cast<double>(lo);
      const double q = lo + 1 < n ? pool[lo] + frac * (pool[lo + 1] - pool[lo])
                                  : pool[lo];
      e.push_back(q);
    }
    edges_.push_back(std::move(e));
  }
}

int QuantileBinning::assign(int dim, double value) const {
  const auto& e = edges_[dim];
  return static_cast<int>(std::upper_bound(e.begin(), e.end(), value) - e.begin());
}

std::int64_t QuantileBinning::cell(const PanelDataset& ds, std::size_t unit,
                                   int period) const {
  std::int64_t id = 0;
  for (int d = 0; d < dims(); ++d)
    id = id * bins_ + assign(d, ds.surrogate(unit, period, d));
  return id;
}

std::int64_t QuantileBinning::n_cells() const {
  std::int64_t n = 1;
  for (int d = 0; d < dims(); ++d) n *= bins_;
  return n;
}

StateIndexer::StateIndexer(const PanelDataset& ds, const QuantileBinning& surrogate_bins)
    : bins_(&surrogate_bins) {
  cov_edges_.resize(ds.r_covariates());
  const int bins = surrogate_bins.bins();
  for (int r = 0; r < ds.r_covariates(); ++r) {
    std::vector<double> pool(ds.n_units());
    for (std::size_t i = 0; i < ds.n_units(); ++i) pool[i] = ds.covariate(i, r);
    std::sort(pool.begin(), pool.end());
    auto& e = cov_edges_[r];
    for (int k = 1; k < bins; ++k) {
      const double h = (static_cast<double>(pool.size()) - 1.0) * k / bins;
      const std::size_t lo = static_cast<std::size_t>(h);
      const double frac = h - static_cast<double>(lo);
      e.push_back(lo + 1 < pool.size() ? pool[lo] + frac * (pool[lo + 1] - pool[lo])
                                       : pool[lo]);
    }
  }
}

std::int64_t StateIndexer::state(const PanelDataset& ds, std::size_t unit,
                                 int period) const {
  std::int64_t id = bins_->cell(ds, unit, period);
  for (std::size_t r = 0; r < cov_edges_.size(); ++r) {
    const auto& e = cov_edges_[r];
    const int b = static_cast<int>(
        std::upper_bound(e.begin(), e.end(), ds.covariate(unit, r)) - e.begin());
    id = id * bins_->bins() + b;
  }
  return id;
}

std::vector<int> StateIndexer::decode(std::int64_t id) const {
  const int total = bins_->dims() + static_cast<int>(cov_edges_.size());
  std::vector<int> coords(total);
  for (int d = total - 1; d >= 0; --d) {
    coords[d] = static_cast<int>(id % bins_->bins());
    id /= bins_->bins();
  }
  return coords;
}

long StateIndexer::l1_distance(std::int64_t a, std::int64_t b) const {
  const std::vector<int> ca = decode(a), cb = decode(b);
  long dist = 0;
  for (std::size_t d = 0; d < ca.size(); ++d) dist += std::abs(ca[d] - cb[d]);
  return dist;
}

QuantileBinning make_surrogate_binning(const PanelDataset& ds, int bins) {
  std::vector<std::vector<double>> pools(ds.d_surrogates());
  const int te = ds.window().t_experimental;
  for (int d = 0; d < ds.d_surrogates(); ++d) {
    pools[d].reserve(ds.n_units() * (te + 1));
    for (std::size_t i = 0; i < ds.n_units(); ++i)
      for (int p = 0; p <= te; ++p) pools[d].push_back(ds.surrogate(i, p, d));
  }
  return QuantileBinning(std::move(pools), bins);
}

}  // namespace longterm
