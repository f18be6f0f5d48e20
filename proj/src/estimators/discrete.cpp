#include "longterm/estimators/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "longterm/errors.hpp"

namespace longterm {

namespace {

std::int64_t nearest_populated(std::int64_t state,
                               const std::map<std::int64_t, DiscreteKernel::Transition>& table,
                               const StateIndexer& states) {
  std::int64_t best = -1;
  long best_dist = std::numeric_limits<long>::max();
  for (const auto& [sid, tr] : table) {
    const long dist = states.l1_distance(state, sid);
    if (dist < best_dist) {
      best_dist = dist;
      best = sid;
    }
  }
  return best;
}

}  // namespace

std::vector<int> interval_schedule(int horizon, int t_experimental) {
  std::vector<int> deltas;
  int left = horizon;
  while (left > 0) {
    const int step = std::min(left, t_experimental);
    deltas.push_back(step);
    left -= step;
  }
  return deltas;
}

DiscreteKernel build_discrete_kernel(const PanelDataset& ds, int arm,
                                     const StateIndexer& states,
                                     const std::vector<int>& deltas) {
  const int te = ds.window().t_experimental;
  DiscreteKernel kernel;
  for (int delta : deltas) {
    if (delta < 1 || delta > te)
      throw EstimationError("discrete kernel: interval length " +
                            std::to_string(delta) + " exceeds T_E");
    auto& trans = kernel.transitions[delta];
    auto& means = kernel.outcome_means[delta];
    std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, long>> counts;
    std::unordered_map<std::int64_t, std::pair<double, long>> ysum;
    for (std::uint32_t i : ds.arm_units(arm)) {
      const std::int64_t from = states.state(ds, i, 0);
      const std::int64_t to = states.state(ds, i, delta);
      ++counts[from][to];
      auto& acc = ysum[from];
      acc.first += ds.outcome(i, delta);
      ++acc.second;
    }
    for (const auto& [from, succ] : counts) {
      DiscreteKernel::Transition tr;
      long total = 0;
      for (const auto& [to, c] : succ) total += c;
      tr.next.reserve(succ.size());
      tr.probability.reserve(succ.size());
      // Map iteration order is not deterministic across libraries; sort.
      std::vector<std::pair<std::int64_t, long>> sorted(succ.begin(), succ.end());
      std::sort(sorted.begin(), sorted.end());
      for (const auto& [to, c] : sorted) {
        tr.next.push_back(to);
        tr.probability.push_back(static_cast<double>(c) / total);
      }
      trans[from] = std::move(tr);
    }
    for (const auto& [from, acc] : ysum)
      means[from] = acc.first / static_cast<double>(acc.second);
  }
  return kernel;
}

EffectTrajectory estimate_longitudinal_discrete(const PanelDataset& ds,
                                                const DiscreteOptions& opts,
                                                RandomStream& stream) {
  const int te = ds.window().t_experimental;
  const int t_total = ds.window().t_total;
  if (opts.mc_draws < 1)
    throw EstimationError("estimate_longitudinal_discrete: mc_draws must be >= 1");

  const QuantileBinning binning = make_surrogate_binning(ds, opts.bins);
  const StateIndexer states(ds, binning);

  // Every interval length any horizon will need.
  std::vector<int> all_deltas;
  for (int t = te + 1; t <= t_total; ++t)
    for (int d : interval_schedule(t, te)) all_deltas.push_back(d);
  std::sort(all_deltas.begin(), all_deltas.end());
  all_deltas.erase(std::unique(all_deltas.begin(), all_deltas.end()),
                   all_deltas.end());

  const DiscreteKernel kernels[2] = {
      build_discrete_kernel(ds, 0, states, all_deltas),
      build_discrete_kernel(ds, 1, states, all_deltas)};

  EffectTrajectory traj;
  traj.t_experimental = te;
  traj.estimator = "longitudinal_discrete";
  traj.options_fingerprint =
      "discrete(bins=" + std::to_string(opts.bins) +
      ",mc_draws=" + std::to_string(opts.mc_draws) + ",zero_support=" +
      (opts.zero_support == ZeroSupportPolicy::abort ? "abort" : "nearest") + ")";
  traj.estimates = observed_effects(ds, te);
  traj.estimates.resize(t_total, 0.0);

  // Units sharing a start state share the nested expectation; evaluate it
  // once per (arm, horizon, start state).
  for (int arm = 0; arm <= 1; ++arm) {
    const DiscreteKernel& kernel = kernels[arm];
    std::map<std::int64_t, long> start_counts;
    for (std::uint32_t i : ds.arm_units(arm)) ++start_counts[states.state(ds, i, 0)];
    const double n_arm = static_cast<double>(ds.arm_units(arm).size());

    for (int horizon = te + 1; horizon <= t_total; ++horizon) {
      const std::vector<int> deltas = interval_schedule(horizon, te);
      const int final_delta = deltas.back();
      double acc = 0.0;
      std::uint64_t state_index = 0;
      for (const auto& [start, count] : start_counts) {
        RandomStream rng = stream.spawn(
            (static_cast<std::uint64_t>(arm) << 40) ^
            (static_cast<std::uint64_t>(horizon) << 32) ^ state_index);
        ++state_index;
        double value = 0.0;
        for (long draw = 0; draw < opts.mc_draws; ++draw) {
          std::int64_t s = start;
          for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
            const auto& table = kernel.transitions.at(deltas[k]);
            auto it = table.find(s);
            if (it == table.end()) {
              if (opts.zero_support == ZeroSupportPolicy::abort)
                throw EstimationError(
                    "discrete estimator: state with zero support (arm=" +
                    std::to_string(arm) + ", state=" + std::to_string(s) + ")");
              s = nearest_populated(s, table, states);
              it = table.find(s);
            }
            const auto& tr = it->second;
            const double u = rng.uniform();
            double cum = 0.0;
            std::int64_t nxt = tr.next.back();
            for (std::size_t j = 0; j < tr.next.size(); ++j) {
              cum += tr.probability[j];
              if (u < cum) {
                nxt = tr.next[j];
                break;
              }
            }
            s = nxt;
          }
          const auto& htable = kernel.outcome_means.at(final_delta);
          auto hit = htable.find(s);
          if (hit == htable.end()) {
            if (opts.zero_support == ZeroSupportPolicy::abort)
              throw EstimationError(
                  "discrete estimator: state with zero outcome support (arm=" +
                  std::to_string(arm) + ", state=" + std::to_string(s) + ")");
            const auto& table = kernel.transitions.at(final_delta);
            hit = htable.find(nearest_populated(s, table, states));
          }
          value += hit->second;
        }
        acc += count * (value / static_cast<double>(opts.mc_draws));
      }
      const double arm_mean = acc / n_arm;
      traj.estimates[horizon - 1] += (arm == 1 ? arm_mean : -arm_mean);
    }
  }
  return traj;
}

}  // namespace longterm
