#include "longterm/estimators/additive.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "longterm/errors.hpp"

namespace longterm {

namespace {

struct MeanTable {
  std::unordered_map<std::int64_t, std::pair<double, long>> acc;

  void add(std::int64_t state, double y) {
    auto& a = acc[state];
    a.first += y;
    ++a.second;
  }
  bool empty() const { return acc.empty(); }
};

template <typename Map>
std::int64_t nearest_key(std::int64_t state, const Map& table,
                         const StateIndexer& states) {
  std::int64_t best = -1;
  long best_dist = std::numeric_limits<long>::max();
  for (const auto& kv : table) {
    const long dist = states.l1_distance(state, kv.first);
    if (dist < best_dist || (dist == best_dist && kv.first < best)) {
      best_dist = dist;
      best = kv.first;
    }
  }
  return best;
}

double lookup_mean(const MeanTable& table, std::int64_t state,
                   const StateIndexer& states, ZeroSupportPolicy policy,
                   const char* what) {
  auto it = table.acc.find(state);
  if (it == table.acc.end()) {
    if (policy == ZeroSupportPolicy::abort || table.empty())
      throw EstimationError(std::string("linear additive model: no support for ") +
                            what + " at state " + std::to_string(state));
    it = table.acc.find(nearest_key(state, table.acc, states));
  }
  return it->second.first / static_cast<double>(it->second.second);
}

}  // namespace

AdditiveEstimate estimate_linear_additive(const PanelDataset& ds,
                                          const AdditiveOptions& opts) {
  const auto& w = ds.window();
  const int te = w.t_experimental;
  const int t_total = w.t_total;
  const int first = w.first_period();

  std::vector<int> breaks = opts.breakpoints;
  if (breaks.empty()) {
    int t = te;
    while (t < t_total) {
      breaks.push_back(t);
      t += te;
    }
  }
  if (breaks.empty() || breaks.front() < 1 || breaks.back() >= t_total)
    throw ConfigError("linear additive model: invalid breakpoint schedule");
  for (std::size_t k = 1; k < breaks.size(); ++k)
    if (breaks[k] <= breaks[k - 1])
      throw ConfigError("linear additive model: breakpoints must be increasing");
  const int t_k_last = breaks.back();
  const int delta_final = t_total - t_k_last;
  if (delta_final > te || breaks.front() > te)
    throw ConfigError("linear additive model: intervals must satisfy delta <= T_E");

  // The consecutive-control index at span T and the mid-term conditioning at
  // period -t_K both need observational depth.
  const int need = std::max(t_k_last, t_total - breaks.front());
  if (w.t_observational < need)
    throw ConfigError("linear additive model: insufficient observational depth (" +
                      std::to_string(w.t_observational) + " < " +
                      std::to_string(need) + ", i.e. fewer than T - t_1 periods)");

  const QuantileBinning binning = make_surrogate_binning(ds, opts.bins);
  const StateIndexer states(ds, binning);
  const int K = static_cast<int>(breaks.size());

  // Index-function spans needed: T - t_k for each k, plus the full span T.
  std::vector<int> spans;
  for (int k = 0; k < K; ++k) spans.push_back(t_total - breaks[k]);
  spans.push_back(t_total);

  // h under consecutive controls, pooled over all windows of the span that
  // lie inside all-control history (any window for control units, purely
  // observational windows for treated units).
  std::unordered_map<int, MeanTable> h_ctrl;
  for (int span : spans) {
    MeanTable table;
    for (std::size_t i = 0; i < ds.n_units(); ++i) {
      const int t_hi = ds.arm(i) == 0 ? te : 0;
      for (int t = first + span; t <= t_hi; ++t) {
        if (t <= first) continue;
        table.add(states.state(ds, i, t - span), ds.outcome(i, t));
      }
    }
    h_ctrl.emplace(span, std::move(table));
  }

  // h under t_K controls followed by the final treated interval; treated
  // units only, fixed alignment around the experiment start.
  MeanTable h_mid;
  for (std::uint32_t i : ds.arm_units(1))
    h_mid.add(states.state(ds, i, -t_k_last), ds.outcome(i, delta_final));

  // Transition kernels p_{t_k}: t_{k-1} controls then Delta t_k treated
  // periods, conditioning state at -t_{k-1}, endpoint at Delta t_k.
  struct Kernel {
    std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, long>> counts;
  };
  std::vector<Kernel> kernels(K);
  for (int k = 0; k < K; ++k) {
    const int t_prev = k == 0 ? 0 : breaks[k - 1];
    const int delta = breaks[k] - t_prev;
    for (std::uint32_t i : ds.arm_units(1)) {
      const std::int64_t from = states.state(ds, i, -t_prev);
      const std::int64_t to = states.state(ds, i, delta);
      ++kernels[k].counts[from][to];
    }
  }

  const double n1 = static_cast<double>(ds.n_treated());
  const double n0 = static_cast<double>(ds.n_control());

  double term_carry = 0.0;
  for (int k = 0; k < K; ++k) {
    const MeanTable& h = h_ctrl.at(t_total - breaks[k]);
    for (std::uint32_t i : ds.arm_units(1)) {
      const std::int64_t start = states.state(ds, i, 0);
      auto it = kernels[k].counts.find(start);
      if (it == kernels[k].counts.end()) {
        if (opts.zero_support == ZeroSupportPolicy::abort)
          throw EstimationError(
              "linear additive model: no transition support at state " +
              std::to_string(start));
        it = kernels[k].counts.find(
            nearest_key(start, kernels[k].counts, states));
      }
      long total = 0;
      for (const auto& kv : it->second) total += kv.second;
      double e = 0.0;
      for (const auto& [to, c] : it->second)
        e += (static_cast<double>(c) / total) *
             lookup_mean(h, to, states, opts.zero_support, "h(controls)");
      term_carry += e;
    }
  }
  term_carry /= n1;

  double term_mid = 0.0;
  for (std::uint32_t i : ds.arm_units(1))
    term_mid += lookup_mean(h_mid, states.state(ds, i, 0), states,
                            opts.zero_support, "h(controls then treatments)");
  term_mid /= n1;

  const MeanTable& h_full = h_ctrl.at(t_total);
  double term_base = 0.0;
  for (std::uint32_t i : ds.arm_units(0))
    term_base += lookup_mean(h_full, states.state(ds, i, 0), states,
                             opts.zero_support, "h(all controls)");
  term_base *= static_cast<double>(K + 1) / n0;

  AdditiveEstimate out;
  out.tau_T = term_carry + term_mid - term_base;
  std::ostringstream os;
  os << "breakpoints={";
  for (int k = 0; k < K; ++k) os << (k ? "," : "") << breaks[k];
  os << "},bins=" << opts.bins;
  out.schedule = os.str();
  return out;
}

}  // namespace longterm
