#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inference.hpp"

// File-based pipeline stages behind the CLI: each is a pure function of
// (input files, config, seed), and reruns are byte-identical. Every stage
// echoes the resolved configuration and version string into its output
// directory.

namespace hw {

const char* version();

struct RunConfig {
  // Paths
  std::string input;            // raw station file (preprocess)
  std::string format = "ecad";  // "ecad" or "csv"
  std::string segments;         // canonical segment CSV
  std::string samples;          // posterior samples CSV
  std::string out = ".";

  std::uint64_t seed = 1;
  int threads = 1;
  int year_from = 1990;
  int year_to = 2011;

  PriorSpec priors;
  MCMCConfig mcmc;

  // generator
  int summers_per_draw = 500;
  int season_length = 92;
  long simulate_max_draws = 200;           // 0 = every retained draw
  std::string huth_thresholds = "observed";  // or "simulated"
  double huth_q1 = 0.975;
  double huth_q2 = 0.81;

  // preprocess
  double smoothing = -1.0;  // < 0 = choose by cross-validation
  int knots = 12;
  bool drop_suspect = false;

  // diagnose
  std::vector<double> chi_thresholds = {28.0, 32.0, 36.0};
  std::vector<int> chi_lags = {1, 5};
  double extremal_quantile = 0.975;
  std::vector<double> chi_curve_quantiles;  // default grid when empty
  int pacf_max_lag = 15;
  long ppc_replicates = 200;  // posterior draws used for the PPC (0 = all)
};

// Parse/serialize the JSON configuration; unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_json(const RunConfig& cfg);

void run_preprocess(const RunConfig& cfg);
void run_fit(const RunConfig& cfg);
void run_simulate(const RunConfig& cfg);
void run_diagnose(const RunConfig& cfg);

}  // namespace hw
