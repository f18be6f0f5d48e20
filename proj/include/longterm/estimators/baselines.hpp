#pragma once

#include "longterm/numerics/rng.hpp"
#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

// Constant extrapolation: the mean of the observed per-period effects is
// projected forward unchanged.
EffectTrajectory estimate_ceb(const PanelDataset& ds);

// Vector autoregression on the arm-level mean series of the outcome plus
// surrogates, lag order p = T_E - 2, per-equation least squares (no
// intercept), forecasts iterated to T. When p is smaller than the number of
// variables, the model keeps the outcome plus p-1 surrogates drawn once from
// `stream`; T_E = 2 falls back to constant extrapolation.
EffectTrajectory estimate_var(const PanelDataset& ds, RandomStream& stream);

}  // namespace longterm
