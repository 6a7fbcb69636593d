#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "csv.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "generator.hpp"
#include "preprocess.hpp"

namespace hw {

using nlohmann::json;

const char* version() { return "0.1.0"; }

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known)
      throw ArgumentError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ArgumentError("config: bad value for '" + std::string(key) +
                        "': " + e.what());
  }
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.out) / name;
}

void write_resolved_config(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream f(out_path(cfg, "resolved_config.json"));
  if (!f) throw IoError("cannot write resolved_config.json under " + cfg.out);
  f << run_config_json(cfg) << "\n";
}

std::vector<double> default_chi_grid() {
  std::vector<double> g;
  for (int i = 50; i <= 99; ++i) g.push_back(i / 100.0);
  g.push_back(0.995);
  return g;
}

// Evenly spaced subsample of n rows, capped at max_rows (0 = keep all).
std::vector<std::size_t> subsample_indices(std::size_t n, long max_rows) {
  std::vector<std::size_t> idx;
  if (max_rows <= 0 || static_cast<long>(n) <= max_rows) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  for (long k = 0; k < max_rows; ++k)
    idx.push_back(static_cast<std::size_t>(
        (static_cast<unsigned long long>(k) * n) / max_rows));
  return idx;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config: top level must be an object");

  // "version" is tolerated so an echoed resolved_config.json can be fed back.
  check_keys(j, "top level",
             {"input", "format", "segments", "samples", "out", "seed",
              "threads", "year_from", "year_to", "priors", "mcmc", "generator",
              "preprocess", "diagnose", "version"});

  RunConfig cfg;
  get_to(j, "input", cfg.input);
  get_to(j, "format", cfg.format);
  get_to(j, "segments", cfg.segments);
  get_to(j, "samples", cfg.samples);
  get_to(j, "out", cfg.out);
  get_to(j, "seed", cfg.seed);
  get_to(j, "threads", cfg.threads);
  get_to(j, "year_from", cfg.year_from);
  get_to(j, "year_to", cfg.year_to);
  if (cfg.format != "ecad" && cfg.format != "csv")
    throw ArgumentError("config: format must be 'ecad' or 'csv'");
  if (cfg.threads < 1) throw ArgumentError("config: threads must be >= 1");

  if (j.contains("priors")) {
    const json& p = j.at("priors");
    check_keys(p, "priors",
               {"log_sigma_mean", "log_sigma_sd", "xi_lo", "xi_hi", "u_center",
                "u_sd", "mu_mean", "mu_sd", "log_sigma_n2_mean",
                "log_sigma_n2_sd", "a0_alpha", "a0_beta", "a1_alpha", "a1_beta"});
    get_to(p, "log_sigma_mean", cfg.priors.log_sigma_mean);
    get_to(p, "log_sigma_sd", cfg.priors.log_sigma_sd);
    get_to(p, "xi_lo", cfg.priors.xi_lo);
    get_to(p, "xi_hi", cfg.priors.xi_hi);
    if (p.contains("u_center") && !p.at("u_center").is_null())
      get_to(p, "u_center", cfg.priors.u_center);
    get_to(p, "u_sd", cfg.priors.u_sd);
    get_to(p, "mu_mean", cfg.priors.mu_mean);
    get_to(p, "mu_sd", cfg.priors.mu_sd);
    get_to(p, "log_sigma_n2_mean", cfg.priors.log_sigma_n2_mean);
    get_to(p, "log_sigma_n2_sd", cfg.priors.log_sigma_n2_sd);
    get_to(p, "a0_alpha", cfg.priors.a0_alpha);
    get_to(p, "a0_beta", cfg.priors.a0_beta);
    get_to(p, "a1_alpha", cfg.priors.a1_alpha);
    get_to(p, "a1_beta", cfg.priors.a1_beta);
  }

  if (j.contains("mcmc")) {
    const json& m = j.at("mcmc");
    check_keys(m, "mcmc",
               {"iterations", "burnin", "thinning", "adaptation_window",
                "target_acceptance"});
    get_to(m, "iterations", cfg.mcmc.n_iterations);
    get_to(m, "burnin", cfg.mcmc.n_burnin);
    get_to(m, "thinning", cfg.mcmc.thinning);
    get_to(m, "adaptation_window", cfg.mcmc.adaptation_window);
    get_to(m, "target_acceptance", cfg.mcmc.target_acceptance);
  }

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    check_keys(g, "generator",
               {"summers_per_draw", "season_length", "max_draws",
                "huth_thresholds", "huth_q1", "huth_q2"});
    get_to(g, "summers_per_draw", cfg.summers_per_draw);
    get_to(g, "season_length", cfg.season_length);
    get_to(g, "max_draws", cfg.simulate_max_draws);
    get_to(g, "huth_thresholds", cfg.huth_thresholds);
    get_to(g, "huth_q1", cfg.huth_q1);
    get_to(g, "huth_q2", cfg.huth_q2);
    if (cfg.huth_thresholds != "observed" && cfg.huth_thresholds != "simulated")
      throw ArgumentError(
          "config: generator.huth_thresholds must be 'observed' or 'simulated'");
  }

  if (j.contains("preprocess")) {
    const json& p = j.at("preprocess");
    check_keys(p, "preprocess", {"smoothing", "knots", "drop_suspect"});
    if (p.contains("smoothing")) {
      if (p.at("smoothing").is_string()) {
        if (p.at("smoothing").get<std::string>() != "cv")
          throw ArgumentError("config: preprocess.smoothing must be a number or 'cv'");
        cfg.smoothing = -1.0;
      } else {
        get_to(p, "smoothing", cfg.smoothing);
        if (cfg.smoothing < 0.0)
          throw ArgumentError("config: preprocess.smoothing must be >= 0");
      }
    }
    get_to(p, "knots", cfg.knots);
    get_to(p, "drop_suspect", cfg.drop_suspect);
  }

  if (j.contains("diagnose")) {
    const json& d = j.at("diagnose");
    check_keys(d, "diagnose",
               {"chi_thresholds", "chi_lags", "extremal_quantile",
                "chi_curve_quantiles", "pacf_max_lag", "ppc_replicates"});
    get_to(d, "chi_thresholds", cfg.chi_thresholds);
    get_to(d, "chi_lags", cfg.chi_lags);
    get_to(d, "extremal_quantile", cfg.extremal_quantile);
    get_to(d, "chi_curve_quantiles", cfg.chi_curve_quantiles);
    get_to(d, "pacf_max_lag", cfg.pacf_max_lag);
    get_to(d, "ppc_replicates", cfg.ppc_replicates);
  }

  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["input"] = cfg.input;
  j["format"] = cfg.format;
  j["segments"] = cfg.segments;
  j["samples"] = cfg.samples;
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["year_from"] = cfg.year_from;
  j["year_to"] = cfg.year_to;
  j["version"] = version();

  json p;
  p["log_sigma_mean"] = cfg.priors.log_sigma_mean;
  p["log_sigma_sd"] = cfg.priors.log_sigma_sd;
  p["xi_lo"] = cfg.priors.xi_lo;
  p["xi_hi"] = cfg.priors.xi_hi;
  if (std::isnan(cfg.priors.u_center))
    p["u_center"] = nullptr;
  else
    p["u_center"] = cfg.priors.u_center;
  p["u_sd"] = cfg.priors.u_sd;
  p["mu_mean"] = cfg.priors.mu_mean;
  p["mu_sd"] = cfg.priors.mu_sd;
  p["log_sigma_n2_mean"] = cfg.priors.log_sigma_n2_mean;
  p["log_sigma_n2_sd"] = cfg.priors.log_sigma_n2_sd;
  p["a0_alpha"] = cfg.priors.a0_alpha;
  p["a0_beta"] = cfg.priors.a0_beta;
  p["a1_alpha"] = cfg.priors.a1_alpha;
  p["a1_beta"] = cfg.priors.a1_beta;
  j["priors"] = p;

  json m;
  m["iterations"] = cfg.mcmc.n_iterations;
  m["burnin"] = cfg.mcmc.n_burnin;
  m["thinning"] = cfg.mcmc.thinning;
  m["adaptation_window"] = cfg.mcmc.adaptation_window;
  m["target_acceptance"] = cfg.mcmc.target_acceptance;
  j["mcmc"] = m;

  json g;
  g["summers_per_draw"] = cfg.summers_per_draw;
  g["season_length"] = cfg.season_length;
  g["max_draws"] = cfg.simulate_max_draws;
  g["huth_thresholds"] = cfg.huth_thresholds;
  g["huth_q1"] = cfg.huth_q1;
  g["huth_q2"] = cfg.huth_q2;
  j["generator"] = g;

  json pre;
  if (cfg.smoothing < 0.0)
    pre["smoothing"] = "cv";
  else
    pre["smoothing"] = cfg.smoothing;
  pre["knots"] = cfg.knots;
  pre["drop_suspect"] = cfg.drop_suspect;
  j["preprocess"] = pre;

  json d;
  d["chi_thresholds"] = cfg.chi_thresholds;
  d["chi_lags"] = cfg.chi_lags;
  d["extremal_quantile"] = cfg.extremal_quantile;
  d["chi_curve_quantiles"] = cfg.chi_curve_quantiles;
  d["pacf_max_lag"] = cfg.pacf_max_lag;
  d["ppc_replicates"] = cfg.ppc_replicates;
  j["diagnose"] = d;

  return j.dump(2);
}

void run_preprocess(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ArgumentError("preprocess: no input file given");
  write_resolved_config(cfg);

  RawStationSeries series = cfg.format == "ecad" ? parse_ecad_file(cfg.input)
                                                 : parse_csv_file(cfg.input);
  auto extraction = extract_jja(series, cfg.year_from, cfg.year_to,
                                cfg.drop_suspect);

  SeasonalSplineOptions opts;
  opts.interior_knots = cfg.knots;
  std::vector<int> days;
  std::vector<double> vals;
  for (const auto& seg : extraction.segments)
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (!seg.missing[t]) {
        days.push_back(static_cast<int>(t) + 1);
        vals.push_back(seg.values[t]);
      }
  if (vals.empty()) throw ArgumentError("preprocess: no observed JJA values");

  double lambda = cfg.smoothing;
  if (lambda < 0.0)
    lambda = cross_validate_smoothing(days, vals, kSeasonLength, opts);
  auto curve =
      fit_seasonal_quantile_spline(days, vals, lambda, kSeasonLength, opts);

  double median = 0.0;
  auto deseason = deseasonalize(extraction.segments, curve, &median);

  csv::write_segments(out_path(cfg, "segments.csv").string(), deseason);
  csv::write_curve(out_path(cfg, "seasonal_curve.csv").string(), curve);

  std::ofstream sum(out_path(cfg, "preprocess_summary.txt"));
  sum << "input: " << cfg.input << "\n";
  sum << "years: " << cfg.year_from << "-" << cfg.year_to << "\n";
  sum << "segments: " << deseason.size() << "\n";
  long missing = 0;
  for (const auto& seg : deseason) missing += static_cast<long>(seg.missing_count());
  sum << "missing_values: " << missing << "\n";
  sum << "suspect_values: " << extraction.suspect_count << "\n";
  sum << "overall_median: " << csv::format_number(median) << "\n";
  sum << "smoothing_lambda: " << csv::format_number(lambda) << "\n";
  for (const auto& w : extraction.warnings) sum << "warning: " << w << "\n";

  std::cout << "preprocess: wrote " << deseason.size() << " segments ("
            << missing << " missing values) to " << cfg.out << "\n";
  for (const auto& w : extraction.warnings)
    std::cout << "preprocess: warning: " << w << "\n";
}

void run_fit(const RunConfig& cfg) {
  if (cfg.segments.empty()) throw ArgumentError("fit: no segment CSV given");
  write_resolved_config(cfg);

  auto observed = csv::read_segments(cfg.segments);
  MCMCConfig mcmc = cfg.mcmc;
  mcmc.seed = cfg.seed;
  FitResult fit = run_chain(observed, cfg.priors, mcmc);

  csv::write_samples(out_path(cfg, "samples.csv").string(), fit.samples);
  csv::write_state_probs(out_path(cfg, "state_probs.csv").string(), observed,
                         fit.samples);
  csv::write_state_runs(out_path(cfg, "state_runs.csv").string(), observed,
                        fit.samples);
  csv::write_imputed(out_path(cfg, "imputed.csv").string(), observed,
                     fit.samples);

  {
    std::FILE* f = std::fopen(out_path(cfg, "trace.csv").string().c_str(), "w");
    if (!f) throw IoError("cannot write trace.csv");
    std::fputs("iteration,log_posterior\n", f);
    for (std::size_t i = 0; i < fit.log_posterior_trace.size(); ++i)
      std::fprintf(f, "%zu,%s\n", i + 1,
                   csv::format_number(fit.log_posterior_trace[i]).c_str());
    std::fclose(f);
  }

  // Retrospective summaries over the observed series.
  std::vector<std::vector<StateSequence>> state_draws;
  state_draws.reserve(fit.samples.size());
  for (const auto& s : fit.samples) state_draws.push_back(s.states);
  if (!state_draws.empty()) {
    auto retro = retrospective_summaries(state_draws, observed);
    csv::write_pmf(out_path(cfg, "retrospective_length_pmf.csv").string(),
                   retro.length_pmf, "length");
    csv::write_pmf(out_path(cfg, "retrospective_count_pmf.csv").string(),
                   retro.count_pmf, "count");
    csv::write_values(out_path(cfg, "retrospective_event_temps.csv").string(),
                      retro.event_temps, "temperature");
  }

  std::ofstream sum(out_path(cfg, "fit_summary.txt"));
  sum << "segments: " << observed.size() << "\n";
  sum << "retained_draws: " << fit.samples.size() << "\n";
  sum << "u_prior_center: " << csv::format_number(fit.resolved_prior.u_center)
      << "\n";
  sum << "acceptance_rates:\n";
  for (const auto& [name, rate] : fit.acceptance_rates)
    sum << "  " << name << ": " << csv::format_number(rate) << "\n";

  std::cout << "fit: retained " << fit.samples.size()
            << " draws; acceptance rates:";
  for (const auto& [name, rate] : fit.acceptance_rates)
    std::cout << " " << name << "=" << static_cast<int>(rate * 100 + 0.5) << "%";
  std::cout << "\n";
}

void run_simulate(const RunConfig& cfg) {
  if (cfg.samples.empty()) throw ArgumentError("simulate: no samples CSV given");
  write_resolved_config(cfg);

  auto rows = csv::read_samples(cfg.samples);
  if (rows.empty()) throw ArgumentError("simulate: samples CSV has no rows");
  auto keep = subsample_indices(rows.size(), cfg.simulate_max_draws);
  std::vector<ModelParams> draws;
  draws.reserve(keep.size());
  for (auto i : keep) draws.push_back(rows[i].params);

  // Huth thresholds from the observed de-seasonalized series, held fixed
  // across simulated summers (per-summer quantiles with "simulated").
  double t1 = kNaN, t2 = kNaN;
  bool fixed_thresholds = cfg.huth_thresholds == "observed";
  if (fixed_thresholds) {
    if (cfg.segments.empty())
      throw ArgumentError(
          "simulate: segment CSV required for observed Huth thresholds "
          "(or set generator.huth_thresholds = 'simulated')");
    auto observed = csv::read_segments(cfg.segments);
    auto pooled = pooled_observed(observed);
    t1 = empirical_quantile(pooled, cfg.huth_q1);
    t2 = empirical_quantile(pooled, cfg.huth_q2);
  }

  csv::SummerWriter writer(out_path(cfg, "summers.csv").string());
  std::vector<std::tuple<long, int, HeatWaveEvent>> ev_implicit, ev_huth,
      ev_worst;
  std::vector<std::tuple<long, int, int>> freq_implicit, freq_huth, freq_worst;

  posterior_weather_generator(
      draws, cfg.summers_per_draw, cfg.season_length, cfg.seed, cfg.threads,
      [&](long d, int k, const SimulatedSummer& s) {
        writer.append(d, k, s);
        auto implicit = detect_implicit(s.values, s.states);
        for (auto& ev : implicit) ev_implicit.emplace_back(d, k, std::move(ev));
        freq_implicit.emplace_back(d, k, static_cast<int>(implicit.size()));

        double ht1 = t1, ht2 = t2;
        if (!fixed_thresholds) {
          ht1 = empirical_quantile(s.values, cfg.huth_q1);
          ht2 = empirical_quantile(s.values, cfg.huth_q2);
        }
        std::vector<HeatWaveEvent> huth;
        if (ht1 > ht2) huth = detect_huth(s.values, ht1, ht2);
        for (auto& ev : huth) ev_huth.emplace_back(d, k, std::move(ev));
        freq_huth.emplace_back(d, k, static_cast<int>(huth.size()));

        auto worst = detect_worst_annual(s.values);
        ev_worst.emplace_back(d, k, std::move(worst));
        freq_worst.emplace_back(d, k, 1);
      });

  csv::write_events(out_path(cfg, "events_implicit.csv").string(), ev_implicit);
  csv::write_events(out_path(cfg, "events_huth.csv").string(), ev_huth);
  csv::write_events(out_path(cfg, "events_worst_annual.csv").string(), ev_worst);
  csv::write_frequencies(out_path(cfg, "frequency_implicit.csv").string(),
                         freq_implicit);
  csv::write_frequencies(out_path(cfg, "frequency_huth.csv").string(), freq_huth);
  csv::write_frequencies(out_path(cfg, "frequency_worst_annual.csv").string(),
                         freq_worst);

  std::cout << "simulate: " << draws.size() << " draws x "
            << cfg.summers_per_draw << " summers written to " << cfg.out << "\n";
}

void run_diagnose(const RunConfig& cfg) {
  if (cfg.segments.empty()) throw ArgumentError("diagnose: no segment CSV given");
  write_resolved_config(cfg);

  auto observed = csv::read_segments(cfg.segments);
  auto pooled = pooled_observed(observed);
  auto grid = cfg.chi_curve_quantiles.empty() ? default_chi_grid()
                                              : cfg.chi_curve_quantiles;

  for (int lag : cfg.chi_lags) {
    auto curve = chi_curve(observed, grid, lag);
    std::vector<double> thresholds;
    for (double q : grid) thresholds.push_back(empirical_quantile(pooled, q));
    csv::write_chi_curve(
        out_path(cfg, "chi_curve_lag" + std::to_string(lag) + ".csv").string(),
        curve, thresholds);
  }

  csv::write_pacf(out_path(cfg, "pacf.csv").string(),
                  pacf(observed, cfg.pacf_max_lag));

  {
    double uq = empirical_quantile(pooled, cfg.extremal_quantile);
    double theta = extremal_index(observed, uq);
    std::FILE* f =
        std::fopen(out_path(cfg, "extremal_index.csv").string().c_str(), "w");
    if (!f) throw IoError("cannot write extremal_index.csv");
    std::fputs("quantile,threshold,estimate\n", f);
    std::fprintf(f, "%s,%s,%s\n", csv::format_number(cfg.extremal_quantile).c_str(),
                 csv::format_number(uq).c_str(), csv::format_number(theta).c_str());
    std::fclose(f);
  }

  {
    // Rank transform of the pooled observed series, aligned back to days.
    auto z = frechet_rank_transform(pooled);
    std::FILE* f =
        std::fopen(out_path(cfg, "frechet_rank.csv").string().c_str(), "w");
    if (!f) throw IoError("cannot write frechet_rank.csv");
    std::fputs("year,day_of_season,z\n", f);
    std::size_t k = 0;
    for (const auto& seg : observed)
      for (std::size_t t = 0; t < seg.size(); ++t)
        if (!seg.missing[t])
          std::fprintf(f, "%d,%zu,%s\n", seg.year, t + 1,
                       csv::format_number(z[k++]).c_str());
    std::fclose(f);
  }

  if (!cfg.samples.empty()) {
    auto rows = csv::read_samples(cfg.samples);
    if (rows.empty()) throw ArgumentError("diagnose: samples CSV has no rows");
    auto keep = subsample_indices(rows.size(), cfg.ppc_replicates);
    std::vector<ModelParams> draws;
    for (auto i : keep) draws.push_back(rows[i].params);

    PPCConfig pc;
    pc.chi_thresholds = cfg.chi_thresholds;
    pc.chi_lags = cfg.chi_lags;
    pc.extremal_quantile = cfg.extremal_quantile;
    pc.seed = cfg.seed;
    pc.threads = cfg.threads;
    auto report = posterior_predictive_check(draws, observed, pc);
    csv::write_ppc(out_path(cfg, "ppc.csv").string(), report);
    std::ofstream tf(out_path(cfg, "ppc_table.txt"));
    tf << format_ppc_table(report);
    std::cout << format_ppc_table(report);
  }

  std::cout << "diagnose: outputs written to " << cfg.out << "\n";
}

}  // namespace hw
