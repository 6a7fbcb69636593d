// Command-line front end for the heat wave model pipeline. All functionality
// lives behind the C API; this binary only assembles the resolved
// configuration, dispatches, and maps status codes to exit codes
// (0 ok, 2 input error, 3 numeric/sampler error).

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatwave/heatwave.h"

namespace {

using nlohmann::json;

int exit_code_for(hw_status s) {
  switch (s) {
    case HW_OK: return 0;
    case HW_ERR_ARGUMENT:
    case HW_ERR_IO:
    case HW_ERR_PARSE: return 2;
    case HW_ERR_NUMERIC: return 3;
    case HW_ERR_INTERNAL: return 3;
  }
  return 3;
}

struct CommonFlags {
  std::string config_path;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON configuration file");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker thread cap");
}

json load_config(const CommonFlags& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config %s\n",
                   f.config_path.c_str());
      std::exit(2);
    }
    try {
      in >> j;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s: %s\n", f.config_path.c_str(), e.what());
      std::exit(2);
    }
  }
  if (f.seed) j["seed"] = *f.seed;
  if (f.out) j["out"] = *f.out;
  if (f.threads) j["threads"] = *f.threads;
  return j;
}

int dispatch(hw_status (*stage)(const char*), const json& cfg) {
  hw_status s = stage(cfg.dump().c_str());
  if (s != HW_OK) std::fprintf(stderr, "error: %s\n", hw_last_error());
  return exit_code_for(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-switching extreme-value model for daily high "
               "temperatures: preprocessing, Bayesian fitting, weather "
               "generation, diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hw_version()));

  // preprocess
  auto* pre = app.add_subcommand(
      "preprocess", "Parse a station file, extract JJA segments, de-seasonalize");
  CommonFlags pre_f;
  add_common(pre, pre_f);
  std::string input, format;
  std::optional<int> year_from, year_to;
  std::optional<std::string> smoothing;
  bool drop_suspect = false;
  pre->add_option("--input", input, "station file (ECA&D or 2-column CSV)");
  pre->add_option("--format", format, "input format: ecad or csv");
  pre->add_option("--year-from", year_from, "first year");
  pre->add_option("--year-to", year_to, "last year");
  pre->add_option("--smoothing", smoothing, "spline penalty, or 'cv'");
  pre->add_flag("--drop-suspect", drop_suspect,
                "treat suspect-quality days as missing");

  // fit
  auto* fit = app.add_subcommand("fit", "Run the block Gibbs sampler");
  CommonFlags fit_f;
  add_common(fit, fit_f);
  std::string fit_segments;
  std::optional<long> iterations, burnin;
  std::optional<int> thinning;
  std::optional<double> u_center, u_sd;
  fit->add_option("--segments", fit_segments, "segment CSV from preprocess");
  fit->add_option("--iterations", iterations, "MCMC iterations");
  fit->add_option("--burnin", burnin, "burn-in iterations");
  fit->add_option("--thin", thinning, "thinning interval");
  fit->add_option("--u-center", u_center, "threshold prior center (degC)");
  fit->add_option("--u-sd", u_sd, "threshold prior sd (degC)");

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Generate summers from posterior draws and detect heat waves");
  CommonFlags sim_f;
  add_common(sim, sim_f);
  std::string sim_samples, sim_segments;
  std::optional<int> summers_per_draw;
  std::optional<long> max_draws;
  std::optional<std::string> huth_thresholds;
  sim->add_option("--samples", sim_samples, "samples CSV from fit");
  sim->add_option("--segments", sim_segments,
                  "segment CSV (for observed Huth thresholds)");
  sim->add_option("--summers-per-draw", summers_per_draw,
                  "summers per posterior draw");
  sim->add_option("--max-draws", max_draws, "cap on posterior draws (0 = all)");
  sim->add_option("--huth-thresholds", huth_thresholds,
                  "'observed' or 'simulated'");

  // diagnose
  auto* diag = app.add_subcommand(
      "diagnose", "Extremal-dependence diagnostics and predictive checks");
  CommonFlags diag_f;
  add_common(diag, diag_f);
  std::string diag_segments, diag_samples;
  std::optional<long> ppc_replicates;
  diag->add_option("--segments", diag_segments, "segment CSV");
  diag->add_option("--samples", diag_samples,
                   "samples CSV (enables the predictive check report)");
  diag->add_option("--ppc-replicates", ppc_replicates,
                   "posterior draws used for the PPC (0 = all)");

  CLI11_PARSE(app, argc, argv);

  if (pre->parsed()) {
    json cfg = load_config(pre_f);
    if (!input.empty()) cfg["input"] = input;
    if (!format.empty()) cfg["format"] = format;
    if (year_from) cfg["year_from"] = *year_from;
    if (year_to) cfg["year_to"] = *year_to;
    if (smoothing) {
      try {
        cfg["preprocess"]["smoothing"] = std::stod(*smoothing);
      } catch (...) {
        cfg["preprocess"]["smoothing"] = *smoothing;
      }
    }
    if (drop_suspect) cfg["preprocess"]["drop_suspect"] = true;
    return dispatch(hw_run_preprocess, cfg);
  }
  if (fit->parsed()) {
    json cfg = load_config(fit_f);
    if (!fit_segments.empty()) cfg["segments"] = fit_segments;
    if (iterations) cfg["mcmc"]["iterations"] = *iterations;
    if (burnin) cfg["mcmc"]["burnin"] = *burnin;
    if (thinning) cfg["mcmc"]["thinning"] = *thinning;
    if (u_center) cfg["priors"]["u_center"] = *u_center;
    if (u_sd) cfg["priors"]["u_sd"] = *u_sd;
    return dispatch(hw_run_fit, cfg);
  }
  if (sim->parsed()) {
    json cfg = load_config(sim_f);
    if (!sim_samples.empty()) cfg["samples"] = sim_samples;
    if (!sim_segments.empty()) cfg["segments"] = sim_segments;
    if (summers_per_draw) cfg["generator"]["summers_per_draw"] = *summers_per_draw;
    if (max_draws) cfg["generator"]["max_draws"] = *max_draws;
    if (huth_thresholds) cfg["generator"]["huth_thresholds"] = *huth_thresholds;
    return dispatch(hw_run_simulate, cfg);
  }
  if (diag->parsed()) {
    json cfg = load_config(diag_f);
    if (!diag_segments.empty()) cfg["segments"] = diag_segments;
    if (!diag_samples.empty()) cfg["samples"] = diag_samples;
    if (ppc_replicates) cfg["diagnose"]["ppc_replicates"] = *ppc_replicates;
    return dispatch(hw_run_diagnose, cfg);
  }
  return 0;
}
