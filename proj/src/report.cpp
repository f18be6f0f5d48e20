#include "longterm/report.hpp"

#include <fstream>

#include "longterm/errors.hpp"
#include "longterm/estimators/baselines.hpp"
#include "longterm/estimators/knn.hpp"

namespace longterm {

using nlohmann::json;

void RunConfig::validate() const {
  if (!seed_set) throw ConfigError("config: seed is mandatory (no wall-clock seeding)");
  if (data_path && synth)
    throw ConfigError("config: data and synth are mutually exclusive");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (data_path) schema.window.validate();
  if (synth) synth->validate();
  for (const auto& e : estimators) {
    if (e.name != "lsm" && e.name != "ceb" && e.name != "var" && e.name != "knn" &&
        e.name != "discrete")
      throw ConfigError("config: unknown estimator '" + e.name + "'");
  }
  if (inference != "none" && inference != "permutation" &&
      inference != "randomization_bootstrap" && inference != "subsample_bootstrap")
    throw ConfigError("config: unknown inference method '" + inference + "'");
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  if (j.contains("data")) {
    const auto& d = j.at("data");
    c.data_path = d.at("path").get<std::string>();
    c.schema.d_surrogates = d.at("d_surrogates").get<int>();
    c.schema.r_covariates = d.value("r_covariates", 0);
    c.schema.window.t_experimental = d.at("t_experimental").get<int>();
    c.schema.window.t_total = d.at("t_total").get<int>();
    c.schema.window.t_observational = d.value("t_observational", 0);
  }
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    SynthSpec spec;
    spec.kind = synth_kind_from_name(s.at("kind").get<std::string>());
    spec.n_per_arm = s.value("n_per_arm", 100000L);
    spec.t_total = s.value("t_total", 10);
    spec.t_experimental = s.at("t_experimental").get<int>();
    spec.t_observational = s.value("t_observational", 0);
    spec.gamma = s.value("gamma", 1.0);
    spec.theta = s.value("theta", 1.0);
    spec.sharp_null = s.value("sharp_null", false);
    c.synth = spec;
  }
  for (const auto& e : j.value("estimators", json::array())) {
    EstimatorConfig ec;
    ec.name = e.at("name").get<std::string>();
    ec.lsm.use_covariates = e.value("use_covariates", false);
    ec.lsm.elastic_net = e.value("elastic_net", false);
    ec.lsm.tune_grid = e.value("tune_grid", 10);
    ec.lsm.tune_folds = e.value("tune_folds", 5);
    if (e.contains("subset")) {
      for (int one_based : e.at("subset").get<std::vector<int>>())
        ec.lsm.surrogate_subset.push_back(one_based - 1);
    }
    ec.knn_k = e.value("k", 20);
    ec.discrete.bins = e.value("bins", 5);
    ec.discrete.mc_draws = e.value("mc_draws", 10000L);
    ec.discrete.zero_support = e.value("zero_support", std::string("abort")) == "abort"
                                   ? ZeroSupportPolicy::abort
                                   : ZeroSupportPolicy::nearest_populated;
    c.estimators.push_back(std::move(ec));
  }
  if (j.contains("inference")) {
    const auto& inf = j.at("inference");
    c.inference = inf.value("method", "none");
    c.inference_opts.replicas = inf.value("replicas", 100L);
    c.inference_opts.level = inf.value("level", 0.95);
    c.inference_opts.subsample_fraction = inf.value("fraction", 0.5);
    c.inference_opts.statistic_period = inf.value("statistic_period", 0);
    c.permutation_m = inf.value("replicas", 200L);
  }
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    auto parse_triples = [&](const char* key) {
      std::vector<ValidationConfig::PeriodTriple> out;
      for (const auto& t : v.value(key, json::array())) {
        ValidationConfig::PeriodTriple pt;
        pt.t = t.at("t").get<int>();
        pt.t_prime = t.at("t_prime").get<int>();
        pt.delta = t.value("delta", 1);
        out.push_back(pt);
      }
      return out;
    };
    c.validation.comparability = parse_triples("comparability");
    c.validation.parallel_trends = parse_triples("parallel_trends");
    c.validation.theta_grid = v.value("theta_grid", std::vector<double>{});
    for (const auto& s : v.value("subsets", json::array())) {
      std::vector<int> subset;
      for (int one_based : s.get<std::vector<int>>()) subset.push_back(one_based - 1);
      c.validation.subsets.push_back(std::move(subset));
    }
    c.validation.bins = v.value("bins", 5);
    c.validation.level = v.value("level", 0.05);
  }
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.seed_set = true;
  }
  c.threads = j.value("threads", 1);
  c.out_dir = j.value("out", std::string("."));
  c.dump_replicates = j.value("dump_replicates", false);
  return c;
}

json run_config_json(const RunConfig& c) {
  json j;
  if (c.data_path) {
    j["data"] = {{"path", *c.data_path},
                 {"d_surrogates", c.schema.d_surrogates},
                 {"r_covariates", c.schema.r_covariates},
                 {"t_experimental", c.schema.window.t_experimental},
                 {"t_total", c.schema.window.t_total},
                 {"t_observational", c.schema.window.t_observational}};
  }
  if (c.synth) {
    j["synth"] = {{"kind", synth_kind_name(c.synth->kind)},
                  {"n_per_arm", c.synth->n_per_arm},
                  {"t_total", c.synth->t_total},
                  {"t_experimental", c.synth->t_experimental},
                  {"t_observational", c.synth->t_observational},
                  {"gamma", c.synth->gamma},
                  {"theta", c.synth->theta},
                  {"sharp_null", c.synth->sharp_null}};
  }
  j["estimators"] = json::array();
  for (const auto& e : c.estimators) {
    json je{{"name", e.name}};
    if (e.name == "lsm") {
      je["use_covariates"] = e.lsm.use_covariates;
      je["elastic_net"] = e.lsm.elastic_net;
      if (!e.lsm.surrogate_subset.empty()) {
        std::vector<int> one_based;
        for (int d : e.lsm.surrogate_subset) one_based.push_back(d + 1);
        je["subset"] = one_based;
      }
    } else if (e.name == "knn") {
      je["k"] = e.knn_k;
    } else if (e.name == "discrete") {
      je["bins"] = e.discrete.bins;
      je["mc_draws"] = e.discrete.mc_draws;
    }
    j["estimators"].push_back(je);
  }
  j["inference"] = {{"method", c.inference},
                    {"replicas", c.inference == "permutation" ? c.permutation_m
                                                              : c.inference_opts.replicas},
                    {"level", c.inference_opts.level},
                    {"fraction", c.inference_opts.subsample_fraction}};
  j["seed"] = c.seed;
  j["dump_replicates"] = c.dump_replicates;
  // Worker count and output location do not influence any number in the
  // report; they are echoed separately so reports stay byte-comparable.
  return j;
}

std::uint64_t config_fingerprint(const json& j) {
  // FNV-1a over the canonical dump.
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

EstimatorFn make_estimator(const EstimatorConfig& cfg) {
  if (cfg.name == "lsm") {
    const LinearSurrogateOptions opts = cfg.lsm;
    return [opts](const PanelDataset& ds, RandomStream&) {
      return estimate_lsm(ds, opts);
    };
  }
  if (cfg.name == "ceb") {
    return [](const PanelDataset& ds, RandomStream&) { return estimate_ceb(ds); };
  }
  if (cfg.name == "var") {
    return [](const PanelDataset& ds, RandomStream& stream) {
      return estimate_var(ds, stream);
    };
  }
  if (cfg.name == "knn") {
    const int k = cfg.knn_k;
    return [k](const PanelDataset& ds, RandomStream&) { return estimate_knn(ds, k); };
  }
  if (cfg.name == "discrete") {
    const DiscreteOptions opts = cfg.discrete;
    return [opts](const PanelDataset& ds, RandomStream& stream) {
      return estimate_longitudinal_discrete(ds, opts, stream);
    };
  }
  throw ConfigError("make_estimator: unknown estimator '" + cfg.name + "'");
}

std::vector<double> ground_truth_effects(const PanelDataset& ds) {
  const int t_total = ds.window().t_total;
  std::vector<double> out;
  for (int p = 1; p <= t_total; ++p) {
    double s1 = 0.0, s0 = 0.0;
    long n1 = 0, n0 = 0;
    for (std::uint32_t i : ds.arm_units(1)) {
      if (!ds.outcome_observed(i, p)) continue;
      s1 += ds.outcome(i, p);
      ++n1;
    }
    for (std::uint32_t i : ds.arm_units(0)) {
      if (!ds.outcome_observed(i, p)) continue;
      s0 += ds.outcome(i, p);
      ++n0;
    }
    if (n1 == 0 || n0 == 0) break;
    out.push_back(s1 / n1 - s0 / n0);
  }
  return out;
}

void RunReport::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << body.dump(2) << "\n";
}

}  // namespace longterm
