#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

// Stochastic weather generation from fitted parameters, heat-wave detection
// under the three definitions, and retrospective posterior summaries.

namespace hw {

enum class DetectRule { Implicit, Huth, WorstAnnual };
const char* detect_rule_name(DetectRule r);

struct HeatWaveEvent {
  int start_day = 0;  // 1-based day index within the summer
  int length = 0;
  std::vector<double> temps;
  DetectRule rule = DetectRule::Implicit;

  double mean_temp() const;
};

struct SimulatedSummer {
  std::vector<double> values;
  StateSequence states;
  long source_draw = -1;
};

// Inverse-CDF draw from f(y_t | y_prev, s_t, s_prev) at uniform variate v:
// direct in the AR(1) case, bisection on the analytic conditional CDF in the
// copula cases (bracket grown geometrically from the margin median,
// probability tolerance 1e-10). Throws NumericError on non-convergence.
double sample_conditional(double y_prev, int s_t, int s_prev,
                          const ModelParams& p, double v);

SimulatedSummer simulate_summer(const ModelParams& p, int n_days, Rng& rng);

// Streams summers_per_draw simulations per posterior draw, in (draw, summer)
// order. Each (draw, summer) pair gets an independent RNG stream derived from
// the master seed via derive_stream_seed, so output is identical for any
// thread count.
void posterior_weather_generator(
    const std::vector<ModelParams>& draws, int summers_per_draw, int n_days,
    std::uint64_t master_seed, int threads,
    const std::function<void(long draw_index, int summer_index,
                             const SimulatedSummer&)>& sink);

// Maximal runs of consecutive state-1 days.
std::vector<HeatWaveEvent> detect_implicit(const std::vector<double>& values,
                                           const StateSequence& states);

// Two-threshold definition: within each maximal run of days above t2, the
// longest contiguous sub-period with at least three days above t1 and mean
// above t1; earliest start on ties.
std::vector<HeatWaveEvent> detect_huth(const std::vector<double>& values,
                                       double t1, double t2);

// The window-length period with the highest mean; earliest on ties. Exactly
// one event per summer.
HeatWaveEvent detect_worst_annual(const std::vector<double>& values,
                                  int window = 3);

struct StateRunRecord {
  long draw = 0;
  int year = 0;
  int start_day = 0;  // 1-based
  int length = 0;
};

struct RetrospectiveSummary {
  std::map<int, double> length_pmf;
  std::map<int, double> count_pmf;   // events per draw over the study period
  std::vector<double> event_temps;   // observed temperatures on event days
};

// Pools implicit events extracted from each posterior draw's sampled states
// over the observed series.
RetrospectiveSummary retrospective_summaries(
    const std::vector<std::vector<StateSequence>>& state_draws,
    const std::vector<SummerSegment>& observed);

RetrospectiveSummary retrospective_from_records(
    const std::vector<StateRunRecord>& records,
    const std::vector<SummerSegment>& observed, long n_draws);

}  // namespace hw
