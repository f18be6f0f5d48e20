#include "longterm/trajectory.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "longterm/errors.hpp"

namespace longterm {

Metrics compute_metrics(const EffectTrajectory& est, const std::vector<double>& truth,
                        const std::vector<EffectTrajectory>* replicas) {
  if (truth.size() != est.estimates.size())
    throw EstimationError("compute_metrics: window mismatch between estimate and truth");
  Metrics m;
  const int te = est.t_experimental;
  const int t_total = est.t_total();
  const int n_future = t_total - te;
  if (n_future <= 0) throw EstimationError("compute_metrics: no future periods");

  for (int t = te + 1; t <= t_total; ++t) {
    const double e = est.at(t) - truth[t - 1];
    m.bias_abs += std::fabs(e);
    m.bias_signed += e;
  }
  m.bias_abs /= n_future;
  m.bias_signed /= n_future;

  if (replicas != nullptr && !replicas->empty()) {
    double acc = 0.0;
    long cnt = 0;
    for (const auto& rep : *replicas) {
      if (rep.t_total() != t_total)
        throw EstimationError("compute_metrics: replica window mismatch");
      for (int t = te + 1; t <= t_total; ++t) {
        const double e = rep.at(t) - truth[t - 1];
        acc += e * e;
        ++cnt;
      }
    }
    m.mse = acc / static_cast<double>(cnt);
    m.mse_from_replicas = true;
  } else {
    for (int t = te + 1; t <= t_total; ++t) {
      const double e = est.at(t) - truth[t - 1];
      m.mse += e * e;
    }
    m.mse /= n_future;
  }
  return m;
}

std::string trajectory_csv(const EffectTrajectory& t) {
  std::ostringstream os;
  os << "period,estimate,provenance,lower,upper\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (int p = 1; p <= t.t_total(); ++p) {
    os << p << ',' << fmt(t.at(p)) << ','
       << (t.observed(p) ? "observed" : "extrapolated") << ',';
    if (!t.lower.empty() && !std::isnan(t.lower[p - 1])) os << fmt(t.lower[p - 1]);
    os << ',';
    if (!t.upper.empty() && !std::isnan(t.upper[p - 1])) os << fmt(t.upper[p - 1]);
    os << '\n';
  }
  return os.str();
}

}  // namespace longterm
