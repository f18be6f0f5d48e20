#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "longterm/panel.hpp"

namespace longterm::testing {

// Builds a panel directly in memory. `fill` is called per (unit, period) and
// must set surrogates (and outcomes for periods past the first).
inline PanelDataset build_panel(
    int n_treated, int n_control, ExperimentWindow window, int d, int r,
    const std::function<void(PanelDataset&, std::size_t unit, int period, int arm)>&
        fill) {
  PanelDataset ds(window, d, r, n_treated + n_control);
  for (int i = 0; i < n_treated + n_control; ++i) {
    const int arm = i < n_treated ? 1 : 0;
    ds.set_unit(i, (arm ? "t" : "c") + std::to_string(i), arm);
    for (int p = window.first_period(); p <= window.t_total; ++p) fill(ds, i, p, arm);
  }
  ds.finalize();
  return ds;
}

// Zeroes every observation past T_E (the estimator no-peeking probe).
inline PanelDataset zero_future(const PanelDataset& ds) {
  PanelDataset out(ds.window(), ds.d_surrogates(), ds.r_covariates(), ds.n_units());
  const auto& w = ds.window();
  for (std::size_t i = 0; i < ds.n_units(); ++i) {
    out.set_unit(i, ds.unit_id(i), ds.arm(i));
    for (int r = 0; r < ds.r_covariates(); ++r)
      out.set_covariate(i, r, ds.covariate(i, r));
    for (int p = w.first_period(); p <= w.t_total; ++p) {
      const bool future = p > w.t_experimental;
      for (int d = 0; d < ds.d_surrogates(); ++d)
        out.set_surrogate(i, p, d, future ? 0.0 : ds.surrogate(i, p, d));
      if (ds.outcome_observed(i, p))
        out.set_outcome(i, p, future ? 0.0 : ds.outcome(i, p));
    }
  }
  out.finalize();
  return out;
}

inline std::uint64_t hash_panel(const PanelDataset& ds) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  const auto& w = ds.window();
  for (std::size_t i = 0; i < ds.n_units(); ++i) {
    mix(ds.arm(i));
    for (int p = w.first_period(); p <= w.t_total; ++p) {
      for (int d = 0; d < ds.d_surrogates(); ++d) {
        std::uint64_t bits;
        const double v = ds.surrogate(i, p, d);
        static_assert(sizeof(bits) == sizeof(v));
        __builtin_memcpy(&bits, &v, sizeof(bits));
        mix(bits);
      }
      if (ds.outcome_observed(i, p)) {
        std::uint64_t bits;
        const double v = ds.outcome(i, p);
        __builtin_memcpy(&bits, &v, sizeof(bits));
        mix(bits);
      }
    }
  }
  return h;
}

}  // namespace longterm::testing
