#include "longterm/synthgen.hpp"

#include <cmath>
#include <limits>
#include <cstdio>

#include "longterm/errors.hpp"
#include "longterm/numerics/rng.hpp"
#include "longterm/numerics/special.hpp"
#include "longterm/parallel.hpp"

namespace longterm {

namespace {

constexpr std::uint64_t kMcTruthSubstreamBase = 0x4000000000000000ULL;
constexpr std::size_t kChunk = 8192;

struct KindConfig {
  int d = 0;
  double mu_mean = 0.0, mu_sd = 1.0;
  double sigma_mean = 0.0, sigma_sd = 1.0;
  std::vector<double> weights;
  std::vector<double> kappa;
  bool treated_decays = false;  // otherwise the treated arm redraws iid
  double control_shift = 0.0;
  double outcome_sign = -1.0;
};

KindConfig kind_config(SynthKind kind) {
  KindConfig c;
  switch (kind) {
    case SynthKind::stabilized1:
      c = {4, 2.0, 1.0, 2.0, 1.0, {0.1, 0.1, 0.4, 0.4}, {0.8, 0.6, 0.4, 0.2},
           true, 0.0, -1.0};
      break;
    case SynthKind::stabilized2:
      c = {4, 1.5, 1.0, 1.0, 1.0, {0.1, 0.1, 0.4, 0.4}, {0.8, 0.6, 0.4, 0.2},
           true, -2.0, +1.0};
      break;
    case SynthKind::comparability_violation:
      // Stationary in both arms so that cross-period matching is calibrated;
      // the gamma shock on the period-2 treated outcome is the only
      // treatment-side term.
      c = {2, 2.0, 1.0, 2.0, 1.0, {0.1, 0.4}, {1.0, 1.0}, false, 0.0, -1.0};
      break;
    case SynthKind::nonlinear:
      c = {2, 2.0, 1.0, 2.0, 1.0, {}, {0.8, 0.6}, true, 0.0, -1.0};
      break;
    case SynthKind::no_effect:
      c = {4, 2.0, 1.0, 2.0, 1.0, {0.1, 0.1, 0.4, 0.4}, {1.0, 1.0, 1.0, 1.0},
           false, 0.0, -1.0};
      break;
  }
  return c;
}

double outcome_from(const KindConfig& cfg, const SynthSpec& spec,
                    const double* s_prev, int period, bool treated) {
  const bool active = treated && !spec.sharp_null;
  switch (spec.kind) {
    case SynthKind::nonlinear:
      return cfg.outcome_sign * (s_prev[0] + spec.theta * std::exp(s_prev[1]));
    case SynthKind::comparability_violation: {
      double y = 0.0;
      for (int d = 0; d < cfg.d; ++d) y += cfg.weights[d] * s_prev[d];
      if (active && period == 2) y *= spec.gamma;
      return cfg.outcome_sign * y;
    }
    case SynthKind::no_effect: {
      double y = 0.0;
      for (int d = 0; d < cfg.d; ++d) y += cfg.weights[d] * s_prev[d];
      y = cfg.outcome_sign * y;
      if (active) {
        // (-1)^t / (t+2)^3 with t = period - 1 (the shock rides on Y_{t+1}).
        const double t = static_cast<double>(period - 1);
        const double denom = (t + 2.0) * (t + 2.0) * (t + 2.0);
        y += ((period - 1) % 2 == 0 ? 1.0 : -1.0) / denom;
      }
      return y;
    }
    default: {
      double y = 0.0;
      for (int d = 0; d < cfg.d; ++d) y += cfg.weights[d] * s_prev[d];
      return cfg.outcome_sign * y;
    }
  }
}

}  // namespace

const char* synth_kind_name(SynthKind k) {
  switch (k) {
    case SynthKind::stabilized1: return "stabilized1";
    case SynthKind::stabilized2: return "stabilized2";
    case SynthKind::comparability_violation: return "comparability_violation";
    case SynthKind::nonlinear: return "nonlinear";
    case SynthKind::no_effect: return "no_effect";
  }
  return "?";
}

SynthKind synth_kind_from_name(const std::string& name) {
  for (SynthKind k : {SynthKind::stabilized1, SynthKind::stabilized2,
                      SynthKind::comparability_violation, SynthKind::nonlinear,
                      SynthKind::no_effect}) {
    if (name == synth_kind_name(k)) return k;
  }
  throw ConfigError("unknown synthetic kind: " + name);
}

void SynthSpec::validate() const {
  if (n_per_arm < 1) throw ConfigError("synth: n_per_arm must be >= 1");
  if (t_experimental < 2 || t_total <= t_experimental)
    throw ConfigError("synth: need 2 <= t_experimental < t_total");
  if (t_observational < 0) throw ConfigError("synth: t_observational >= 0");
  if (gamma <= 0.0) throw ConfigError("synth: gamma must be positive");
}

int SynthSpec::n_surrogates() const { return kind_config(kind).d; }

double folded_normal_mean(double mean, double sd) {
  const double z = mean / sd;
  const double phi = std::exp(-0.5 * z * z) * 0.3989422804014326779;
  return mean * (2.0 * normal_cdf(z) - 1.0) + 2.0 * sd * phi;
}

double folded_normal_exp_moment(double a, double mean, double sd) {
  const double z = mean / sd;
  const double common = 0.5 * a * a * sd * sd;
  return std::exp(a * mean + common) * normal_cdf(z + a * sd) +
         std::exp(-a * mean + common) * normal_cdf(a * sd - z);
}

namespace {

TruthOracle analytic_truth(const SynthSpec& spec, const KindConfig& cfg,
                           const DrawnParams& par) {
  TruthOracle oracle;
  oracle.method = TruthOracle::Method::analytic;
  oracle.tau.resize(spec.t_total, 0.0);
  if (spec.sharp_null) return oracle;

  const int d = cfg.d;
  std::vector<double> m1(d), m0(d);
  for (int k = 0; k < d; ++k) {
    m1[k] = folded_normal_mean(par.mu[k], par.sigma[k]);
    m0[k] = folded_normal_mean(par.mu[k] + par.control_shift, par.sigma[k]);
  }

  for (int p = 1; p <= spec.t_total; ++p) {
    double tau = 0.0;
    switch (spec.kind) {
      case SynthKind::stabilized1:
      case SynthKind::stabilized2: {
        for (int k = 0; k < d; ++k)
          tau += par.weights[k] *
                 (std::pow(par.kappa[k], p - 1) * m1[k] - m0[k]);
        tau *= par.outcome_sign;
        break;
      }
      case SynthKind::comparability_violation: {
        if (p == 2) {
          double a = 0.0;
          for (int k = 0; k < d; ++k) a += par.weights[k] * m1[k];
          tau = par.outcome_sign * (spec.gamma - 1.0) * a;
        }
        break;
      }
      case SynthKind::nonlinear: {
        const double k1 = std::pow(par.kappa[0], p - 1);
        const double k2 = std::pow(par.kappa[1], p - 1);
        const double mt = folded_normal_exp_moment(k2, par.mu[1], par.sigma[1]);
        const double mc = folded_normal_exp_moment(1.0, par.mu[1], par.sigma[1]);
        tau = par.outcome_sign *
              ((k1 * m1[0] + spec.theta * mt) - (m1[0] + spec.theta * mc));
        break;
      }
      case SynthKind::no_effect: {
        const double t = static_cast<double>(p - 1);
        const double denom = (t + 2.0) * (t + 2.0) * (t + 2.0);
        tau = ((p - 1) % 2 == 0 ? 1.0 : -1.0) / denom;
        break;
      }
    }
    oracle.tau[p - 1] = tau;
  }
  return oracle;
}

DrawnParams draw_params(const SynthSpec& spec, const KindConfig& cfg) {
  RandomStream param_stream(spec.seed, 0);
  DrawnParams par;
  par.mu.resize(cfg.d);
  par.sigma.resize(cfg.d);
  for (int d = 0; d < cfg.d; ++d) {
    par.mu[d] = param_stream.folded_normal(cfg.mu_mean, cfg.mu_sd);
    par.sigma[d] = param_stream.folded_normal(cfg.sigma_mean, cfg.sigma_sd);
  }
  par.weights = cfg.weights;
  par.kappa = cfg.kappa;
  par.control_shift = cfg.control_shift;
  par.outcome_sign = cfg.outcome_sign;
  return par;
}

// Simulates one unit trajectory; `s_buf` must hold n_rows * d doubles, and
// `y_buf` n_rows doubles (first entry left NaN by the caller's convention).
void simulate_unit(const SynthSpec& spec, const KindConfig& cfg,
                   const DrawnParams& par, bool treated, RandomStream& rng,
                   double* s_buf, double* y_buf) {
  const int d = cfg.d;
  const int first = -spec.t_observational;
  const bool decays = cfg.treated_decays && treated && !spec.sharp_null;
  const double shift = treated && !spec.sharp_null ? 0.0 : par.control_shift;
  int row = 0;
  for (int p = first; p <= spec.t_total; ++p, ++row) {
    double* s = s_buf + static_cast<std::size_t>(row) * d;
    const double* s_prev = s - d;
    if (decays && p >= 1) {
      for (int k = 0; k < d; ++k) s[k] = par.kappa[k] * s_prev[k];
    } else {
      for (int k = 0; k < d; ++k)
        s[k] = rng.folded_normal(par.mu[k] + shift, par.sigma[k]);
    }
    if (p > first) y_buf[row] = outcome_from(cfg, spec, s_prev, p, treated);
  }
}

}  // namespace

SynthPanel generate(const SynthSpec& spec, int threads) {
  spec.validate();
  const KindConfig cfg = kind_config(spec.kind);
  const DrawnParams par = draw_params(spec, cfg);

  ExperimentWindow window{spec.t_experimental, spec.t_total, spec.t_observational};
  const std::size_t n = 2 * static_cast<std::size_t>(spec.n_per_arm);
  PanelDataset panel(window, cfg.d, 0, n);

  char idbuf[24];
  for (std::size_t i = 0; i < n; ++i) {
    const bool treated = i < static_cast<std::size_t>(spec.n_per_arm);
    std::snprintf(idbuf, sizeof(idbuf), "%c%zu", treated ? 't' : 'c',
                  treated ? i + 1 : i - spec.n_per_arm + 1);
    panel.set_unit(i, idbuf, treated ? 1 : 0);
  }

  // Unit chunks map to fixed substreams, so the panel is identical for any
  // worker count.
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  const int n_rows = window.n_rows();
  const int d = cfg.d;
  std::vector<double> s_all(n * n_rows * d);
  std::vector<double> y_all(n * n_rows,
                            std::numeric_limits<double>::quiet_NaN());
  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    RandomStream rng(spec.seed, 1 + chunk);
    const std::size_t lo = chunk * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const bool treated = i < static_cast<std::size_t>(spec.n_per_arm);
      simulate_unit(spec, cfg, par, treated, rng,
                    s_all.data() + i * n_rows * d, y_all.data() + i * n_rows);
    }
  });

  const int first = window.first_period();
  for (std::size_t i = 0; i < n; ++i) {
    for (int p = first; p <= spec.t_total; ++p) {
      const int row = window.row(p);
      for (int k = 0; k < d; ++k)
        panel.set_surrogate(i, p, k, s_all[(i * n_rows + row) * d + k]);
      if (p > first) panel.set_outcome(i, p, y_all[i * n_rows + row]);
    }
  }
  panel.finalize();

  return SynthPanel{std::move(panel), analytic_truth(spec, cfg, par), par};
}

TruthOracle mc_truth(const SynthSpec& spec, const DrawnParams& params, long mega_n,
                     int threads) {
  spec.validate();
  if (mega_n < 2) throw ConfigError("mc_truth: mega_n must be >= 2");
  const KindConfig cfg = kind_config(spec.kind);

  const int t = spec.t_total;
  const int n_rows = ExperimentWindow{spec.t_experimental, t, spec.t_observational}
                         .n_rows();
  const long per_chunk = static_cast<long>(kChunk);
  const long n_chunks = (mega_n + per_chunk - 1) / per_chunk;

  // Accumulate per-period sums and sums of squares per arm.
  struct Acc {
    std::vector<double> sum1, sum0, sq1, sq0;
  };
  std::vector<Acc> acc(n_chunks);

  parallel_for(static_cast<std::size_t>(n_chunks), threads, [&](std::size_t chunk) {
    RandomStream rng(spec.seed, kMcTruthSubstreamBase + chunk);
    Acc& a = acc[chunk];
    a.sum1.assign(t, 0.0);
    a.sum0.assign(t, 0.0);
    a.sq1.assign(t, 0.0);
    a.sq0.assign(t, 0.0);
    std::vector<double> s(static_cast<std::size_t>(n_rows) * cfg.d);
    std::vector<double> y(n_rows);
    const long lo = static_cast<long>(chunk) * per_chunk;
    const long hi = std::min(mega_n, lo + per_chunk);
    for (long i = lo; i < hi; ++i) {
      for (int arm = 1; arm >= 0; --arm) {
        simulate_unit(spec, cfg, params, arm == 1, rng, s.data(), y.data());
        for (int p = 1; p <= t; ++p) {
          const double v = y[p + spec.t_observational];
          if (arm == 1) {
            a.sum1[p - 1] += v;
            a.sq1[p - 1] += v * v;
          } else {
            a.sum0[p - 1] += v;
            a.sq0[p - 1] += v * v;
          }
        }
      }
    }
  });

  TruthOracle oracle;
  oracle.method = TruthOracle::Method::monte_carlo;
  oracle.tau.resize(t);
  oracle.mc_se.resize(t);
  const double n = static_cast<double>(mega_n);
  for (int p = 0; p < t; ++p) {
    double s1 = 0, s0 = 0, q1 = 0, q0 = 0;
    for (const auto& a : acc) {
      s1 += a.sum1[p];
      s0 += a.sum0[p];
      q1 += a.sq1[p];
      q0 += a.sq0[p];
    }
    const double m1 = s1 / n, m0 = s0 / n;
    const double v1 = std::max(0.0, q1 / n - m1 * m1);
    const double v0 = std::max(0.0, q0 / n - m0 * m0);
    oracle.tau[p] = m1 - m0;
    oracle.mc_se[p] = std::sqrt(v1 / n + v0 / n);
  }
  return oracle;
}

}  // namespace longterm
