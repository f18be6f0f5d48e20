#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "longterm/errors.hpp"
#include "longterm/estimators/baselines.hpp"
#include "longterm/estimators/knn.hpp"
#include "longterm/report.hpp"
#include "longterm/synthgen.hpp"
#include "longterm/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace longterm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitEstimation = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  bool dump_replicates = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration");
  cmd->add_option("--seed", flags.seed, "seed override (mandatory here or in config)");
  cmd->add_option("--threads", flags.threads, "worker threads");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_flag("--dump-replicates", flags.dump_replicates,
                "write raw replicate trajectories into the report");
}

RunConfig load_config(const CommonFlags& flags) {
  json j = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw ConfigError("cannot open config: " + flags.config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  RunConfig cfg = parse_run_config(j);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.seed_set = true;
  }
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  if (flags.dump_replicates) cfg.dump_replicates = true;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

json provenance_entry(const char* module, const char* operation,
                      std::uint64_t seed) {
  return json{{"module", module}, {"operation", operation}, {"seed", seed}};
}

json trajectory_json(const EffectTrajectory& t) {
  json j;
  j["estimator"] = t.estimator;
  j["options"] = t.options_fingerprint;
  j["t_experimental"] = t.t_experimental;
  j["estimates"] = t.estimates;
  if (!t.lower.empty()) {
    j["lower"] = t.lower;
    j["upper"] = t.upper;
  }
  return j;
}

struct LoadedData {
  PanelDataset panel;
  std::vector<double> truth;  // empty when unknown
  std::string truth_source;
};

LoadedData load_data(const RunConfig& cfg) {
  if (!cfg.synth && !cfg.data_path)
    throw ConfigError("config: a data or synth block is required");
  if (cfg.synth) {
    SynthSpec spec = *cfg.synth;
    spec.seed = cfg.seed;
    SynthPanel sp = generate(spec, cfg.threads);
    return LoadedData{std::move(sp.panel), std::move(sp.truth.tau),
                      "synthetic_analytic"};
  }
  PanelDataset panel = load_panel(*cfg.data_path, cfg.schema);
  std::vector<double> truth;
  std::string source = "none";
  if (panel.has_future_truth()) {
    truth = ground_truth_effects(panel);
    if (static_cast<int>(truth.size()) == panel.window().t_total)
      source = "future_outcome_columns";
    else
      truth.clear();
  }
  return LoadedData{std::move(panel), std::move(truth), source};
}

int cmd_simulate(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags);
  if (!cfg.synth) throw ConfigError("simulate: config must carry a synth block");
  SynthSpec spec = *cfg.synth;
  spec.seed = cfg.seed;
  SynthPanel sp = generate(spec, cfg.threads);

  const fs::path dir(cfg.out_dir);
  save_panel(sp.panel, (dir / "panel.csv").string());

  json sidecar;
  sidecar["spec"] = {{"kind", synth_kind_name(spec.kind)},
                     {"n_per_arm", spec.n_per_arm},
                     {"t_total", spec.t_total},
                     {"t_experimental", spec.t_experimental},
                     {"t_observational", spec.t_observational},
                     {"seed", spec.seed},
                     {"gamma", spec.gamma},
                     {"theta", spec.theta},
                     {"sharp_null", spec.sharp_null}};
  sidecar["drawn_params"] = {{"mu", sp.params.mu},
                             {"sigma", sp.params.sigma},
                             {"weights", sp.params.weights},
                             {"kappa", sp.params.kappa},
                             {"control_shift", sp.params.control_shift},
                             {"outcome_sign", sp.params.outcome_sign}};
  sidecar["truth"] = {{"method", "analytic"}, {"tau", sp.truth.tau}};
  std::ofstream side(dir / "panel.spec.json");
  side << sidecar.dump(2) << "\n";
  std::cout << "wrote " << (dir / "panel.csv").string() << " ("
            << sp.panel.n_units() << " units x " << sp.panel.window().n_rows()
            << " periods)\n";
  return 0;
}

int cmd_estimate(const CommonFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load_config(flags);
  if (cfg.estimators.empty())
    throw ConfigError("estimate: no estimators configured");
  LoadedData data = load_data(cfg);

  json report;
  const json cfg_json = run_config_json(cfg);
  report["config"] = cfg_json;
  report["config"]["fingerprint"] = config_fingerprint(cfg_json);
  report["execution"] = {{"threads", cfg.threads}, {"out", cfg.out_dir}};
  report["trajectories"] = json::array();
  report["metrics"] = json::array();
  report["validation"] = json::object();
  report["provenance"] = json::array();
  json timings = json::object();

  const fs::path dir(cfg.out_dir);
  std::uint64_t est_index = 0;
  for (const auto& ec : cfg.estimators) {
    const auto e0 = std::chrono::steady_clock::now();
    EstimatorFn est = make_estimator(ec);
    RandomStream stream(cfg.seed, 0x100 + est_index);
    EffectTrajectory traj = est(data.panel, stream);

    json traj_json;
    std::vector<EffectTrajectory> replicates;
    if (cfg.inference == "subsample_bootstrap") {
      InferenceOptions opts = cfg.inference_opts;
      opts.threads = cfg.threads;
      SubsampleBootstrap boot = subsample_bootstrap(
          data.panel, est, RandomStream(cfg.seed, 0x9000 + est_index), opts);
      traj.lower = boot.band.lower;
      traj.upper = boot.band.upper;
      replicates = std::move(boot.replicates);
      traj_json = trajectory_json(traj);
      traj_json["band"] = {{"method", "subsample_bootstrap"},
                           {"level", boot.band.level},
                           {"replicas", boot.band.replicas},
                           {"failures", boot.band.failures},
                           {"var_tau_T", boot.band.var_tau_T}};
      report["provenance"].push_back(
          provenance_entry("inference", "subsample_bootstrap", cfg.seed));
    } else if (cfg.inference == "randomization_bootstrap") {
      InferenceOptions opts = cfg.inference_opts;
      opts.threads = cfg.threads;
      CIBand band = randomization_bootstrap(
          data.panel, est, cfg.inference_opts.replicas,
          RandomStream(cfg.seed, 0x9000 + est_index), opts);
      traj.lower = band.lower;
      traj.upper = band.upper;
      traj_json = trajectory_json(traj);
      traj_json["band"] = {{"method", "randomization_bootstrap"},
                           {"level", band.level},
                           {"replicas", band.replicas},
                           {"failures", band.failures},
                           {"var_tau_T", band.var_tau_T}};
      report["provenance"].push_back(
          provenance_entry("inference", "randomization_bootstrap", cfg.seed));
    } else if (cfg.inference == "permutation") {
      InferenceOptions opts = cfg.inference_opts;
      opts.threads = cfg.threads;
      PermutationResult perm = permutation_test(
          data.panel, est, cfg.permutation_m,
          RandomStream(cfg.seed, 0x9000 + est_index), opts);
      traj_json = trajectory_json(traj);
      traj_json["permutation"] = {{"observed_statistic", perm.observed_statistic},
                                  {"p_value", perm.p_value},
                                  {"replicas", perm.requested},
                                  {"failures", perm.failures}};
      if (cfg.dump_replicates)
        traj_json["permutation"]["replicate_statistics"] = perm.replicate_statistics;
      report["provenance"].push_back(
          provenance_entry("inference", "permutation_test", cfg.seed));
    } else {
      traj_json = trajectory_json(traj);
    }

    if (cfg.dump_replicates && !replicates.empty()) {
      traj_json["replicates"] = json::array();
      for (const auto& r : replicates)
        traj_json["replicates"].push_back(r.estimates);
    }

    if (!data.truth.empty()) {
      const Metrics m = compute_metrics(
          traj, data.truth, replicates.empty() ? nullptr : &replicates);
      report["metrics"].push_back({{"estimator", ec.name},
                                   {"bias", m.bias_abs},
                                   {"bias_signed", m.bias_signed},
                                   {"mse", m.mse},
                                   {"mse_from_replicas", m.mse_from_replicas},
                                   {"truth_source", data.truth_source}});
    }

    report["trajectories"].push_back(traj_json);
    report["provenance"].push_back(
        provenance_entry("estimators", ("estimate_" + ec.name).c_str(), cfg.seed));

    std::ofstream csv(dir / ("trajectory_" + ec.name + ".csv"));
    csv << trajectory_csv(traj);

    const auto e1 = std::chrono::steady_clock::now();
    timings[ec.name + "_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(e1 - e0).count();
    ++est_index;
  }

  const auto t1 = std::chrono::steady_clock::now();
  timings["total_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  report["timings"] = timings;

  RunReport{report}.write((dir / "report.json").string());
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_validate(const CommonFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load_config(flags);
  LoadedData data = load_data(cfg);
  const auto& v = cfg.validation;

  json report;
  const json cfg_json = run_config_json(cfg);
  report["config"] = cfg_json;
  report["config"]["fingerprint"] = config_fingerprint(cfg_json);
  report["execution"] = {{"threads", cfg.threads}, {"out", cfg.out_dir}};
  report["trajectories"] = json::array();
  report["metrics"] = json::array();
  json validation = json::object();
  report["provenance"] = json::array();

  // Randomization checks come first: arm-count chi-square plus per-variable
  // balance t-tests on the pre-treatment columns.
  {
    const BalanceReport balance = pretreatment_balance(data.panel);
    json checks;
    checks["srm"] = {{"statistic", balance.srm_statistic}, {"p_value", balance.srm_p}};
    json vars = json::array();
    auto emit = [&vars](const VariableTest& t) {
      vars.push_back({{"name", t.name},
                      {"statistic", t.result.statistic},
                      {"p_value", t.result.p_value},
                      {"degenerate", t.degenerate}});
    };
    for (const auto& t : balance.pretreatment_surrogates) emit(t);
    for (const auto& t : balance.covariates) emit(t);
    checks["balance"] = vars;
    validation["randomization_checks"] = checks;
    report["provenance"].push_back(
        provenance_entry("panel", "pretreatment_balance", cfg.seed));
  }

  const QuantileBinning binning = make_surrogate_binning(data.panel, v.bins);

  std::vector<StratumTestSummary> all_strata;
  validation["comparability"] = json::array();
  for (const auto& trip : v.comparability) {
    const auto rows =
        comparability_test(data.panel, trip.t, trip.t_prime, trip.delta, binning);
    for (const auto& r : rows) {
      all_strata.push_back(r);
      validation["comparability"].push_back(
          {{"group", r.arm == 1 ? "treatment" : "control"},
           {"t", r.t},
           {"t_prime", r.t_prime},
           {"delta", r.delta},
           {"n_tests", r.n_tests},
           {"n_p10", r.n_p_below_10},
           {"n_p05", r.n_p_below_05},
           {"n_excluded_small", r.n_excluded_small},
           {"pct10", 100.0 * r.frac_p10()},
           {"pct05", 100.0 * r.frac_p05()}});
    }
    report["provenance"].push_back(
        provenance_entry("validation", "comparability_test", cfg.seed));
  }

  validation["parallel_trends"] = json::array();
  std::uint64_t pt_index = 0;
  for (const auto& trip : v.parallel_trends) {
    const ParallelTrendsResult r = parallel_trends_test(
        data.panel, trip.t, trip.t_prime, trip.delta, binning,
        RandomStream(cfg.seed, 0x7000 + pt_index++), v.level);
    validation["parallel_trends"].push_back({{"t", r.t},
                                             {"t_prime", r.t_prime},
                                             {"delta", r.delta},
                                             {"beta3_hat", r.beta3_hat},
                                             {"t_statistic", r.t_statistic},
                                             {"p_value", r.p_value},
                                             {"reject", r.reject},
                                             {"pairs_treated", r.matched_pairs_treated},
                                             {"pairs_control", r.matched_pairs_control}});
    report["provenance"].push_back(
        provenance_entry("validation", "parallel_trends_test", cfg.seed));
  }

  if (!v.theta_grid.empty() || !v.subsets.empty()) {
    if (cfg.estimators.empty())
      throw ConfigError("validate: sensitivity analyses need an estimator entry");
    if (data.truth.empty())
      throw ConfigError("validate: sensitivity analyses need ground truth "
                        "(synthetic data or future outcome columns)");
  }
  if (!v.theta_grid.empty()) {
    const EstimatorFn est = make_estimator(cfg.estimators.front());
    const SensitivityCurve curve = sensitivity_omitted_surrogate(
        data.panel, est, data.truth, v.theta_grid, RandomStream(cfg.seed, 0x7100));
    json pts = json::array();
    for (const auto& p : curve.points)
      pts.push_back({{"theta", p.parameter}, {"bias", p.bias_abs}, {"rmse", p.rmse}});
    validation["sensitivity_omitted_surrogate"] = pts;
    report["provenance"].push_back(
        provenance_entry("validation", "sensitivity_omitted_surrogate", cfg.seed));
  }
  if (!v.subsets.empty()) {
    const EstimatorConfig base = cfg.estimators.front();
    auto subset_est = [&base](const PanelDataset& ds, const std::vector<int>& subset,
                              RandomStream& stream) {
      EstimatorConfig ec = base;
      ec.lsm.surrogate_subset = subset;
      return make_estimator(ec)(ds, stream);
    };
    const SensitivityCurve curve = sensitivity_surrogate_subsets(
        data.panel, subset_est, data.truth, v.subsets, RandomStream(cfg.seed, 0x7200));
    json pts = json::array();
    for (const auto& p : curve.points)
      pts.push_back({{"subset", p.label}, {"bias", p.bias_abs}, {"rmse", p.rmse}});
    validation["sensitivity_surrogate_subsets"] = pts;
    report["provenance"].push_back(
        provenance_entry("validation", "sensitivity_surrogate_subsets", cfg.seed));
  }

  report["validation"] = validation;
  const auto t1 = std::chrono::steady_clock::now();
  report["timings"] = {{"total_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                                        t1 - t0)
                                        .count()}};

  const fs::path dir(cfg.out_dir);
  std::ofstream csv(dir / "validation.csv");
  csv << comparability_csv(all_strata);
  RunReport{report}.write((dir / "validation.json").string());
  std::cout << "wrote " << (dir / "validation.json").string() << "\n";
  return 0;
}

int cmd_bench(const CommonFlags& flags, int n_seeds, long n_per_arm) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load_config(flags);
  const fs::path dir(cfg.out_dir);

  json report;
  report["config"] = run_config_json(cfg);
  report["config"]["bench"] = {{"seeds", n_seeds}, {"n_per_arm", n_per_arm}};
  report["config"]["fingerprint"] = config_fingerprint(report["config"]);
  report["execution"] = {{"threads", cfg.threads}, {"out", cfg.out_dir}};
  report["trajectories"] = json::array();
  report["validation"] = json::object();
  report["provenance"] = json::array();
  json tables = json::array();

  // Stabilized-effect tables: mean bias/MSE per estimator x T_E.
  for (SynthKind kind : {SynthKind::stabilized1, SynthKind::stabilized2}) {
    for (int te : {2, 3, 4}) {
      struct Acc {
        double bias = 0.0, mse = 0.0;
      };
      std::map<std::string, Acc> acc;
      for (int s = 0; s < n_seeds; ++s) {
        SynthSpec spec;
        spec.kind = kind;
        spec.n_per_arm = n_per_arm;
        spec.t_total = 10;
        spec.t_experimental = te;
        spec.seed = cfg.seed + 1000 * s;
        SynthPanel sp = generate(spec, cfg.threads);
        for (const char* name : {"lsm", "ceb", "var"}) {
          EstimatorConfig ec;
          ec.name = name;
          RandomStream stream(spec.seed, 0x200);
          const EffectTrajectory traj = make_estimator(ec)(sp.panel, stream);
          const Metrics m = compute_metrics(traj, sp.truth.tau);
          acc[name].bias += m.bias_abs / n_seeds;
          acc[name].mse += m.mse / n_seeds;
        }
      }
      for (const auto& [name, a] : acc) {
        tables.push_back({{"table", synth_kind_name(kind)},
                          {"estimator", name},
                          {"t_experimental", te},
                          {"bias", a.bias},
                          {"mse", a.mse}});
      }
    }
  }
  report["provenance"].push_back(provenance_entry("cli", "cmd_bench", cfg.seed));

  // Comparability-violation sweep: parallel-trends and comparability tests
  // per gamma.
  json sweep = json::array();
  for (double gamma : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    long reject_pt = 0;
    double pct05_treat = 0.0;
    long n_ok = 0;
    for (int s = 0; s < n_seeds; ++s) {
      SynthSpec spec;
      spec.kind = SynthKind::comparability_violation;
      spec.n_per_arm = std::min<long>(n_per_arm, 20000);
      spec.t_total = 10;
      spec.t_experimental = 3;
      spec.gamma = gamma;
      spec.seed = cfg.seed + 1000 * s + 7;
      SynthPanel sp = generate(spec, cfg.threads);
      const QuantileBinning binning = make_surrogate_binning(sp.panel, 5);
      const ParallelTrendsResult pt = parallel_trends_test(
          sp.panel, 2, 3, 1, binning, RandomStream(spec.seed, 0x7000), 0.05);
      if (pt.reject) ++reject_pt;
      const auto rows = comparability_test(sp.panel, 2, 3, 1, binning);
      for (const auto& r : rows)
        if (r.arm == 1) pct05_treat += r.frac_p05();
      ++n_ok;
    }
    sweep.push_back({{"gamma", gamma},
                     {"parallel_trends_reject_rate",
                      static_cast<double>(reject_pt) / n_ok},
                     {"comparability_pct05_treated", 100.0 * pct05_treat / n_ok}});
  }
  report["validation"]["gamma_sweep"] = sweep;
  report["metrics"] = tables;

  const auto t1 = std::chrono::steady_clock::now();
  report["timings"] = {{"total_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                                        t1 - t0)
                                        .count()}};

  // Stable golden-diffable table schema.
  std::ofstream csv(dir / "bench.csv");
  csv << "table,estimator,t_experimental,bias,mse\n";
  char buf[64];
  for (const auto& row : tables) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", row.at("bias").get<double>(),
                  row.at("mse").get<double>());
    csv << row.at("table").get<std::string>() << ','
        << row.at("estimator").get<std::string>() << ','
        << row.at("t_experimental").get<int>() << ',' << buf << '\n';
  }
  RunReport{report}.write((dir / "bench.json").string());
  std::cout << "wrote " << (dir / "bench.json").string() << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const CommonFlags& flags) {
  if (inputs.empty()) throw ConfigError("report: no input reports given");
  json merged;
  merged["config"] = json::array();
  merged["trajectories"] = json::array();
  merged["metrics"] = json::array();
  merged["validation"] = json::array();
  merged["timings"] = json::array();
  merged["provenance"] = json::array();
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw DataError("report parse error in " + path + ": " + e.what());
    }
    merged["config"].push_back(j.value("config", json::object()));
    for (const auto& t : j.value("trajectories", json::array()))
      merged["trajectories"].push_back(t);
    for (const auto& m : j.value("metrics", json::array()))
      merged["metrics"].push_back(m);
    merged["validation"].push_back(j.value("validation", json::object()));
    merged["timings"].push_back(j.value("timings", json::object()));
    for (const auto& p : j.value("provenance", json::array()))
      merged["provenance"].push_back(p);
  }
  const fs::path dir(flags.out_dir.value_or("."));
  fs::create_directories(dir);
  RunReport{merged}.write((dir / "merged_report.json").string());
  std::cout << "wrote " << (dir / "merged_report.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-horizon treatment-effect estimation from short experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  int bench_seeds = 20;
  long bench_n = 100000;
  std::vector<std::string> report_inputs;

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic panel");
  add_common(sim, flags);
  CLI::App* est = app.add_subcommand("estimate", "fit estimators and report");
  add_common(est, flags);
  CLI::App* val = app.add_subcommand("validate", "assumption diagnostics");
  add_common(val, flags);
  CLI::App* bench = app.add_subcommand("bench", "synthetic benchmark tables");
  add_common(bench, flags);
  bench->add_option("--seeds", bench_seeds, "number of seeds per cell");
  bench->add_option("--n-per-arm", bench_n, "units per arm");
  CLI::App* rep = app.add_subcommand("report", "merge run reports");
  rep->add_option("inputs", report_inputs, "report.json files");
  add_common(rep, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (est->parsed()) return cmd_estimate(flags);
    if (val->parsed()) return cmd_validate(flags);
    if (bench->parsed()) return cmd_bench(flags, bench_seeds, bench_n);
    if (rep->parsed()) return cmd_report(report_inputs, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DesignViolationError& e) {
    std::cerr << "design violation: " << e.what() << "\n";
    return kExitData;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const InferenceError& e) {
    std::cerr << "inference error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const DiagnosticError& e) {
    std::cerr << "diagnostic error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
