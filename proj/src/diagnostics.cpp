#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "generator.hpp"

namespace hw {

double empirical_quantile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  if (q <= 0.0) return v.front();
  if (q >= 1.0) return v.back();
  double h = (static_cast<double>(v.size()) - 1.0) * q;
  std::size_t lo = static_cast<std::size_t>(h);
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::vector<double> pooled_observed(const std::vector<SummerSegment>& data) {
  std::vector<double> out;
  for (const auto& seg : data)
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (!seg.missing[t]) out.push_back(seg.values[t]);
  return out;
}

namespace {

std::vector<SummerSegment> as_single_segment(const std::vector<double>& series) {
  SummerSegment seg;
  seg.year = 0;
  seg.values = series;
  seg.missing.assign(series.size(), 0);
  return {seg};
}

}  // namespace

double chi_hat(const std::vector<SummerSegment>& data, double u, int lag) {
  if (lag < 1) throw ArgumentError("chi_hat: lag must be >= 1");
  long denom = 0, num = 0;
  for (const auto& seg : data) {
    for (std::size_t t = lag; t < seg.size(); ++t) {
      if (seg.missing[t] || seg.missing[t - lag]) continue;
      if (seg.values[t - lag] > u) {
        ++denom;
        if (seg.values[t] > u) ++num;
      }
    }
  }
  if (denom == 0) return kNaN;
  return static_cast<double>(num) / static_cast<double>(denom);
}

double chi_hat(const std::vector<double>& series, double u, int lag) {
  return chi_hat(as_single_segment(series), u, lag);
}

std::vector<std::pair<double, double>> chi_curve(
    const std::vector<SummerSegment>& data,
    const std::vector<double>& quantile_grid, int lag) {
  auto pooled = pooled_observed(data);
  std::vector<std::pair<double, double>> out;
  out.reserve(quantile_grid.size());
  for (double q : quantile_grid) {
    if (!(q > 0.0 && q < 1.0))
      throw ArgumentError("chi_curve: quantile grid must lie in (0,1)");
    double u = empirical_quantile(pooled, q);
    out.emplace_back(q, chi_hat(data, u, lag));
  }
  return out;
}

double extremal_index(const std::vector<SummerSegment>& data, double u) {
  // Within-segment inter-exceedance times, pooled.
  std::vector<double> gaps;
  for (const auto& seg : data) {
    long prev = -1;
    for (std::size_t t = 0; t < seg.size(); ++t) {
      if (seg.missing[t] || !(seg.values[t] > u)) continue;
      if (prev >= 0) gaps.push_back(static_cast<double>(t) - prev);
      prev = static_cast<long>(t);
    }
  }
  if (gaps.empty()) return kNaN;
  double m = static_cast<double>(gaps.size());
  double maxgap = *std::max_element(gaps.begin(), gaps.end());
  double est;
  if (maxgap <= 2.0) {
    double s1 = 0.0, s2 = 0.0;
    for (double g : gaps) {
      s1 += g;
      s2 += g * g;
    }
    est = 2.0 * s1 * s1 / (m * s2);
  } else {
    double s1 = 0.0, s2 = 0.0;
    for (double g : gaps) {
      s1 += g - 1.0;
      s2 += (g - 1.0) * (g - 2.0);
    }
    est = 2.0 * s1 * s1 / (m * s2);
  }
  return std::min(est, 1.0);
}

double extremal_index(const std::vector<double>& series, double u) {
  return extremal_index(as_single_segment(series), u);
}

PacfResult pacf(const std::vector<SummerSegment>& data, int max_lag) {
  if (max_lag < 1) throw ArgumentError("pacf: max_lag must be >= 1");
  bool long_enough = false;
  for (const auto& seg : data)
    if (seg.size() > static_cast<std::size_t>(max_lag) + 1) long_enough = true;
  if (!long_enough)
    throw ArgumentError("pacf: no segment longer than max_lag + 1");

  auto pooled = pooled_observed(data);
  const double n = static_cast<double>(pooled.size());
  double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / n;

  std::vector<double> gamma(max_lag + 1, 0.0);
  for (const auto& seg : data)
    for (int k = 0; k <= max_lag; ++k)
      for (std::size_t t = k; t < seg.size(); ++t) {
        if (seg.missing[t] || seg.missing[t - k]) continue;
        gamma[k] += (seg.values[t] - mean) * (seg.values[t - k] - mean);
      }
  for (auto& g : gamma) g /= n;
  if (!(gamma[0] > 0.0))
    throw NumericError("pacf: series has zero variance");

  std::vector<double> rho(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) rho[k] = gamma[k] / gamma[0];

  // Durbin-Levinson.
  PacfResult out;
  out.values.resize(max_lag);
  out.band = 1.96 / std::sqrt(n);
  std::vector<double> phi_prev(max_lag + 1, 0.0), phi_cur(max_lag + 1, 0.0);
  for (int k = 1; k <= max_lag; ++k) {
    double num = rho[k], den = 1.0;
    for (int j = 1; j < k; ++j) {
      num -= phi_prev[j] * rho[k - j];
      den -= phi_prev[j] * rho[j];
    }
    double pk = num / den;
    out.values[k - 1] = pk;
    for (int j = 1; j < k; ++j) phi_cur[j] = phi_prev[j] - pk * phi_prev[k - j];
    phi_cur[k] = pk;
    phi_prev = phi_cur;
  }
  return out;
}

PacfResult pacf(const std::vector<double>& series, int max_lag) {
  return pacf(as_single_segment(series), max_lag);
}

std::vector<double> frechet_rank_transform(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = -1.0 / std::log(ranks[k] / (static_cast<double>(n) + 1.0));
  return out;
}

std::vector<std::string> ppc_statistic_names(const PPCConfig& cfg) {
  std::vector<std::string> names = {"q0.99", "q0.999"};
  {
    char buf[48];
    std::snprintf(buf, sizeof buf, "theta%g", cfg.extremal_quantile);
    names.emplace_back(buf);
  }
  for (double u : cfg.chi_thresholds)
    for (int lag : cfg.chi_lags) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "chi%d(%g)", lag, u);
      names.emplace_back(buf);
    }
  return names;
}

std::vector<double> ppc_statistics(const std::vector<SummerSegment>& data,
                                   double extremal_threshold,
                                   const PPCConfig& cfg) {
  auto pooled = pooled_observed(data);
  std::vector<double> out;
  out.push_back(empirical_quantile(pooled, 0.99));
  out.push_back(empirical_quantile(pooled, 0.999));
  out.push_back(extremal_index(data, extremal_threshold));
  for (double u : cfg.chi_thresholds)
    for (int lag : cfg.chi_lags) out.push_back(chi_hat(data, u, lag));
  return out;
}

PPCReport posterior_predictive_check(const std::vector<ModelParams>& draws,
                                     const std::vector<SummerSegment>& observed,
                                     const PPCConfig& cfg) {
  if (draws.empty()) throw ArgumentError("ppc: no posterior draws");
  if (observed.empty()) throw ArgumentError("ppc: no observed segments");

  double u_ext =
      empirical_quantile(pooled_observed(observed), cfg.extremal_quantile);
  auto names = ppc_statistic_names(cfg);
  auto obs_stats = ppc_statistics(observed, u_ext, cfg);

  // One replicate dataset per draw: same segment count and lengths.
  const std::size_t n_stats = names.size();
  std::vector<std::vector<double>> rep_stats(draws.size());
  auto run_replicate = [&](std::size_t d) {
    std::vector<SummerSegment> rep(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
      Rng rng(derive_stream_seed(cfg.seed, d, i));
      auto sim = simulate_summer(draws[d],
                                 static_cast<int>(observed[i].size()), rng);
      rep[i].year = observed[i].year;
      rep[i].values = std::move(sim.values);
      rep[i].missing.assign(rep[i].values.size(), 0);
    }
    rep_stats[d] = ppc_statistics(rep, u_ext, cfg);
  };
  if (cfg.threads <= 1) {
    for (std::size_t d = 0; d < draws.size(); ++d) run_replicate(d);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (draws.size() + cfg.threads - 1) / cfg.threads;
    for (int w = 0; w < cfg.threads; ++w) {
      std::size_t a = w * chunk, b = std::min(a + chunk, draws.size());
      if (a >= b) break;
      pool.emplace_back([&, a, b] {
        for (std::size_t d = a; d < b; ++d) run_replicate(d);
      });
    }
    for (auto& th : pool) th.join();
  }

  PPCReport report;
  report.n_replicates = static_cast<long>(draws.size());
  for (std::size_t k = 0; k < n_stats; ++k) {
    std::vector<double> col;
    col.reserve(draws.size());
    for (const auto& rs : rep_stats)
      if (std::isfinite(rs[k])) col.push_back(rs[k]);
    PPCEntry e;
    e.name = names[k];
    e.observed = obs_stats[k];
    e.excluded_replicates = static_cast<long>(draws.size() - col.size());
    if (!col.empty()) {
      e.lower = empirical_quantile(col, cfg.interval_lo);
      e.upper = empirical_quantile(col, cfg.interval_hi);
      e.inside = std::isfinite(e.observed) && e.observed >= e.lower &&
                 e.observed <= e.upper;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

std::string format_ppc_table(const PPCReport& report) {
  std::ostringstream os;
  auto cell = [](double v) {
    char buf[32];
    if (std::isfinite(v))
      std::snprintf(buf, sizeof buf, "%10.3f", v);
    else
      std::snprintf(buf, sizeof buf, "%10s", "NA");
    return std::string(buf);
  };
  os << "          ";
  for (const auto& e : report.entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %10s", e.name.c_str());
    os << buf;
  }
  os << "\n  q_lower ";
  for (const auto& e : report.entries) os << " " << cell(e.lower);
  os << "\n  obs.    ";
  for (const auto& e : report.entries) os << " " << cell(e.observed);
  os << "\n  q_upper ";
  for (const auto& e : report.entries) os << " " << cell(e.upper);
  os << "\n  inside  ";
  for (const auto& e : report.entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %10s", e.inside ? "yes" : "no");
    os << buf;
  }
  os << "\n";
  return os.str();
}

}  // namespace hw
