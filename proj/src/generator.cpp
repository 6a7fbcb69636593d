#include "generator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "errors.hpp"

namespace hw {

const char* detect_rule_name(DetectRule r) {
  switch (r) {
    case DetectRule::Implicit: return "implicit";
    case DetectRule::Huth: return "huth";
    case DetectRule::WorstAnnual: return "worst_annual";
  }
  return "?";
}

double HeatWaveEvent::mean_temp() const {
  if (temps.empty()) return kNaN;
  double s = 0.0;
  for (double v : temps) s += v;
  return s / static_cast<double>(temps.size());
}

namespace {

double margin_median(int s, const ModelParams& p) {
  if (s == 1) return gpd_quantile(0.5, p.u, p.sigma, p.xi);
  return p.mu;
}

double margin_upper_end(int s, const ModelParams& p) {
  if (s == 1 && p.xi < -kXiExpLimit) return p.u - p.sigma / p.xi;
  return -kNegInf;
}

double conditional_cdf(double y_t, double y_prev, int s_t, int s_prev,
                       const ModelParams& p) {
  return std::exp(conditional_log_cdf(y_t, y_prev, s_t, s_prev, p));
}

}  // namespace

double sample_conditional(double y_prev, int s_t, int s_prev,
                          const ModelParams& p, double v) {
  if (s_t == 0 && s_prev == 0) {
    double mean = p.mu + p.phi * (y_prev - p.mu);
    return mean + p.sigma_n() * norm_quantile(v);
  }

  const double scale = (s_t == 1) ? p.sigma : p.sigma_n();
  const double upper = margin_upper_end(s_t, p);

  // Bracket the root, growing geometrically away from the margin median.
  double lo, hi;
  if (s_t == 1) {
    lo = p.u;  // F = 0 there
  } else {
    lo = margin_median(s_t, p);
    double step = scale;
    while (conditional_cdf(lo, y_prev, s_t, s_prev, p) >= v) {
      lo -= step;
      step *= 2.0;
    }
  }
  hi = margin_median(s_t, p);
  if (std::isfinite(upper)) {
    hi = upper;  // F = 1 there
  } else {
    double step = scale;
    while (conditional_cdf(hi, y_prev, s_t, s_prev, p) <= v) {
      hi += step;
      step *= 2.0;
    }
  }

  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = conditional_cdf(mid, y_prev, s_t, s_prev, p);
    if (std::abs(f - v) <= 1e-10) return mid;
    // Bracket collapsed to floating-point resolution: the CDF is numerically
    // vertical here (near-complete dependence) and mid is the inverse.
    if (hi - lo <= 1e-13 * (1.0 + std::abs(mid))) return mid;
    if (f < v)
      lo = mid;
    else
      hi = mid;
  }
  throw NumericError(
      "conditional inverse-CDF bisection did not converge; the conditional "
      "density and CDF disagree");
}

SimulatedSummer simulate_summer(const ModelParams& p, int n_days, Rng& rng) {
  if (n_days < 2) throw ArgumentError("simulate_summer: need at least 2 days");
  SimulatedSummer out;
  out.values.resize(n_days);
  out.states.resize(n_days);

  auto st = stationary_state_distribution(p.a0, p.a1);
  out.states[0] = rng.bernoulli(st.pi1) ? 1 : 0;
  if (out.states[0] == 1)
    out.values[0] = gpd_quantile(rng.uniform(), p.u, p.sigma, p.xi);
  else
    out.values[0] = rng.normal(p.mu, std::sqrt(p.stationary_var()));

  for (int t = 1; t < n_days; ++t) {
    double enter = out.states[t - 1] == 1 ? p.a1 : p.a0;
    out.states[t] = rng.bernoulli(enter) ? 1 : 0;
    if (out.states[t] == 0 && out.states[t - 1] == 0) {
      double mean = p.mu + p.phi * (out.values[t - 1] - p.mu);
      out.values[t] = rng.normal(mean, p.sigma_n());
    } else {
      out.values[t] = sample_conditional(out.values[t - 1], out.states[t],
                                         out.states[t - 1], p, rng.uniform());
    }
  }
  return out;
}

void posterior_weather_generator(
    const std::vector<ModelParams>& draws, int summers_per_draw, int n_days,
    std::uint64_t master_seed, int threads,
    const std::function<void(long, int, const SimulatedSummer&)>& sink) {
  if (draws.empty()) throw ArgumentError("weather generator: no posterior draws");
  if (summers_per_draw <= 0)
    throw ArgumentError("weather generator: summers_per_draw must be positive");
  threads = std::max(1, threads);

  const long n_tasks =
      static_cast<long>(draws.size()) * static_cast<long>(summers_per_draw);
  const long block = std::max<long>(threads * 64, 256);
  std::vector<SimulatedSummer> buf;

  for (long begin = 0; begin < n_tasks; begin += block) {
    const long end = std::min(begin + block, n_tasks);
    buf.assign(end - begin, SimulatedSummer{});
    auto worker = [&](long wbegin, long wend) {
      for (long k = wbegin; k < wend; ++k) {
        long d = k / summers_per_draw;
        long j = k % summers_per_draw;
        Rng rng(derive_stream_seed(master_seed, static_cast<std::uint64_t>(d),
                                   static_cast<std::uint64_t>(j)));
        buf[k - begin] = simulate_summer(draws[d], n_days, rng);
        buf[k - begin].source_draw = d;
      }
    };
    if (threads == 1) {
      worker(begin, end);
    } else {
      std::vector<std::thread> pool;
      long chunk = (end - begin + threads - 1) / threads;
      for (int w = 0; w < threads; ++w) {
        long a = begin + w * chunk;
        long b = std::min(a + chunk, end);
        if (a >= b) break;
        pool.emplace_back(worker, a, b);
      }
      for (auto& th : pool) th.join();
    }
    for (long k = begin; k < end; ++k)
      sink(k / summers_per_draw, static_cast<int>(k % summers_per_draw),
           buf[k - begin]);
  }
}

std::vector<HeatWaveEvent> detect_implicit(const std::vector<double>& values,
                                           const StateSequence& states) {
  std::vector<HeatWaveEvent> out;
  const int n = static_cast<int>(states.size());
  int t = 0;
  while (t < n) {
    if (states[t] != 1) {
      ++t;
      continue;
    }
    int b = t;
    while (b < n && states[b] == 1) ++b;
    HeatWaveEvent ev;
    ev.rule = DetectRule::Implicit;
    ev.start_day = t + 1;
    ev.length = b - t;
    if (!values.empty())
      ev.temps.assign(values.begin() + t, values.begin() + b);
    out.push_back(std::move(ev));
    t = b;
  }
  return out;
}

std::vector<HeatWaveEvent> detect_huth(const std::vector<double>& values,
                                       double t1, double t2) {
  if (!(t1 > t2)) throw ArgumentError("detect_huth: requires t1 > t2");
  std::vector<HeatWaveEvent> out;
  const int n = static_cast<int>(values.size());
  int t = 0;
  while (t < n) {
    if (!(values[t] > t2)) {
      ++t;
      continue;
    }
    int b = t;
    while (b < n && values[b] > t2) ++b;
    // Longest sub-period of [t, b) with >= 3 days above t1 and mean > t1;
    // earliest start wins ties.
    int best_start = -1, best_len = 0;
    for (int len = b - t; len >= 3 && best_start < 0; --len) {
      for (int a = t; a + len <= b; ++a) {
        int above = 0;
        double sum = 0.0;
        for (int k = a; k < a + len; ++k) {
          if (values[k] > t1) ++above;
          sum += values[k];
        }
        if (above >= 3 && sum / len > t1) {
          best_start = a;
          best_len = len;
          break;
        }
      }
    }
    if (best_start >= 0) {
      HeatWaveEvent ev;
      ev.rule = DetectRule::Huth;
      ev.start_day = best_start + 1;
      ev.length = best_len;
      ev.temps.assign(values.begin() + best_start,
                      values.begin() + best_start + best_len);
      out.push_back(std::move(ev));
    }
    t = b;
  }
  return out;
}

HeatWaveEvent detect_worst_annual(const std::vector<double>& values,
                                  int window) {
  const int n = static_cast<int>(values.size());
  if (window < 1 || n < window)
    throw ArgumentError("detect_worst_annual: series shorter than the window");
  double best = kNegInf;
  int best_start = 0;
  for (int a = 0; a + window <= n; ++a) {
    double s = 0.0;
    for (int k = a; k < a + window; ++k) s += values[k];
    if (s > best) {
      best = s;
      best_start = a;
    }
  }
  HeatWaveEvent ev;
  ev.rule = DetectRule::WorstAnnual;
  ev.start_day = best_start + 1;
  ev.length = window;
  ev.temps.assign(values.begin() + best_start, values.begin() + best_start + window);
  return ev;
}

RetrospectiveSummary retrospective_summaries(
    const std::vector<std::vector<StateSequence>>& state_draws,
    const std::vector<SummerSegment>& observed) {
  std::vector<StateRunRecord> records;
  for (std::size_t d = 0; d < state_draws.size(); ++d) {
    if (state_draws[d].size() != observed.size())
      throw ArgumentError("retrospective: draw/segment count mismatch");
    for (std::size_t i = 0; i < observed.size(); ++i) {
      auto events = detect_implicit({}, state_draws[d][i]);
      for (const auto& ev : events)
        records.push_back({static_cast<long>(d), observed[i].year, ev.start_day,
                           ev.length});
    }
  }
  return retrospective_from_records(records, observed,
                                    static_cast<long>(state_draws.size()));
}

RetrospectiveSummary retrospective_from_records(
    const std::vector<StateRunRecord>& records,
    const std::vector<SummerSegment>& observed, long n_draws) {
  if (n_draws <= 0) throw ArgumentError("retrospective: n_draws must be positive");
  RetrospectiveSummary out;
  std::map<int, long> len_counts;
  std::map<long, long> per_draw;
  long total_events = 0;

  for (const auto& r : records) {
    ++len_counts[r.length];
    ++per_draw[r.draw];
    ++total_events;
    for (const auto& seg : observed) {
      if (seg.year != r.year) continue;
      for (int k = r.start_day - 1; k < r.start_day - 1 + r.length; ++k)
        if (k >= 0 && k < static_cast<int>(seg.size()) && !seg.missing[k])
          out.event_temps.push_back(seg.values[k]);
      break;
    }
  }

  for (auto [len, c] : len_counts)
    out.length_pmf[len] = static_cast<double>(c) / static_cast<double>(total_events);

  std::map<long, long> count_hist;
  long draws_with_events = 0;
  for (auto [draw, c] : per_draw) {
    ++count_hist[c];
    ++draws_with_events;
  }
  if (draws_with_events < n_draws)
    count_hist[0] += n_draws - draws_with_events;
  for (auto [c, nd] : count_hist)
    out.count_pmf[static_cast<int>(c)] =
        static_cast<double>(nd) / static_cast<double>(n_draws);
  return out;
}

}  // namespace hw
