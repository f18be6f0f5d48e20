#pragma once

#include "longterm/panel.hpp"
#include "longterm/trajectory.hpp"

namespace longterm {

// Same iterative lag-window scheme as the linear surrogate model, with the
// index functions evaluated as the mean target over the k nearest training
// windows (Euclidean distance, per arm). Distance ties at the k-th neighbor
// break toward the lowest unit index.
EffectTrajectory estimate_knn(const PanelDataset& ds, int k = 20);

}  // namespace longterm
