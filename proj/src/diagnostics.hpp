#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

// Exploratory and confirmatory diagnostics. All estimators respect segment
// boundaries: no pair of days from different segments ever enters a count.
// Undefined estimates are NaN sentinels, never zeros.

namespace hw {

// Empirical quantile with linear interpolation (R type 7).
double empirical_quantile(std::vector<double> values, double q);

std::vector<double> pooled_observed(const std::vector<SummerSegment>& data);

// P(y_t > u | y_{t-lag} > u) over within-segment pairs with both days
// observed. NaN when no predecessor exceeds u.
double chi_hat(const std::vector<SummerSegment>& data, double u, int lag);
double chi_hat(const std::vector<double>& series, double u, int lag);

// chi_hat evaluated at empirical quantiles of the pooled data.
std::vector<std::pair<double, double>> chi_curve(
    const std::vector<SummerSegment>& data,
    const std::vector<double>& quantile_grid, int lag);

// Ferro-Segers intervals estimator from within-segment inter-exceedance
// times, clamped to (0,1]. NaN with fewer than two exceedances in every
// segment.
double extremal_index(const std::vector<SummerSegment>& data, double u);
double extremal_index(const std::vector<double>& series, double u);

struct PacfResult {
  std::vector<double> values;  // lags 1..max_lag
  double band = 0.0;           // +-1.96/sqrt(n)
};

// Durbin-Levinson on segment-pooled autocovariances.
PacfResult pacf(const std::vector<SummerSegment>& data, int max_lag);
PacfResult pacf(const std::vector<double>& series, int max_lag);

// z_i = -1/log(r_i/(n+1)) with average ranks on ties.
std::vector<double> frechet_rank_transform(const std::vector<double>& values);

// --- Posterior predictive checks (Table-1-style statistic set) ---

struct PPCConfig {
  std::vector<double> chi_thresholds = {28.0, 32.0, 36.0};
  std::vector<int> chi_lags = {1, 5};
  double extremal_quantile = 0.975;
  double interval_lo = 0.025;
  double interval_hi = 0.975;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Statistic names and values for one dataset; extremal_threshold is held
// fixed (the observed quantile) across replicates.
std::vector<std::string> ppc_statistic_names(const PPCConfig& cfg);
std::vector<double> ppc_statistics(const std::vector<SummerSegment>& data,
                                   double extremal_threshold,
                                   const PPCConfig& cfg);

struct PPCEntry {
  std::string name;
  double observed = kNaN;
  double lower = kNaN;
  double upper = kNaN;
  bool inside = false;
  long excluded_replicates = 0;  // replicates where the statistic was undefined
};

struct PPCReport {
  std::vector<PPCEntry> entries;
  long n_replicates = 0;
};

// One replicate dataset per posterior draw, matching the observed segment
// count and lengths, simulated from that draw's parameters.
PPCReport posterior_predictive_check(const std::vector<ModelParams>& draws,
                                     const std::vector<SummerSegment>& observed,
                                     const PPCConfig& cfg);

// Render in the layout of the reference table: one column per statistic,
// rows lower quantile / observed / upper quantile.
std::string format_ppc_table(const PPCReport& report);

}  // namespace hw
