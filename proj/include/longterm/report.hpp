#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "longterm/estimators/discrete.hpp"
#include "longterm/estimators/linear_surrogate.hpp"
#include "longterm/inference.hpp"
#include "longterm/panel.hpp"
#include "longterm/synthgen.hpp"
#include "longterm/validation.hpp"

#include <json.hpp>

namespace longterm {

struct EstimatorConfig {
  std::string name;  // lsm | ceb | var | knn | discrete
  LinearSurrogateOptions lsm;
  int knn_k = 20;
  DiscreteOptions discrete;
};

struct ValidationConfig {
  struct PeriodTriple {
    int t = 0, t_prime = 0, delta = 1;
  };
  std::vector<PeriodTriple> comparability;
  std::vector<PeriodTriple> parallel_trends;
  std::vector<double> theta_grid;
  std::vector<std::vector<int>> subsets;  // 0-based surrogate indices
  int bins = 5;
  double level = 0.05;
};

struct RunConfig {
  std::optional<std::string> data_path;
  ColumnSpec schema;
  std::optional<SynthSpec> synth;
  std::vector<EstimatorConfig> estimators;
  std::string inference = "none";  // none | permutation | randomization_bootstrap
                                   // | subsample_bootstrap
  InferenceOptions inference_opts;
  long permutation_m = 200;
  ValidationConfig validation;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string out_dir = ".";
  bool dump_replicates = false;

  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_json(const RunConfig& c);
std::uint64_t config_fingerprint(const nlohmann::json& j);

// Builds the estimator closure for one config entry.
EstimatorFn make_estimator(const EstimatorConfig& cfg);

// Per-period arm-mean differences over every period with outcomes present in
// both arms; the benchmarking ground truth for file datasets. Reads the
// future columns, so it must never feed an estimator.
std::vector<double> ground_truth_effects(const PanelDataset& ds);

struct RunReport {
  nlohmann::json body;
  void write(const std::string& path) const;
};

}  // namespace longterm
