#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "diagnostics.hpp"
#include "generator.hpp"
#include "inference.hpp"
#include "model.hpp"

// Canonical CSV formats exchanged between pipeline stages. Every file carries
// a one-line header; numbers are serialized with 17 significant digits;
// undefined values are the string NA.

namespace hw::csv {

std::string format_number(double v);

// segments.csv: year,day_of_season,value,missing
void write_segments(const std::string& path,
                    const std::vector<SummerSegment>& segments);
std::vector<SummerSegment> read_segments(const std::string& path);

// seasonal_curve.csv: day_of_season,value
void write_curve(const std::string& path, const std::vector<double>& curve);
std::vector<double> read_curve(const std::string& path);

// samples.csv: draw,a0,a1,u,sigma,xi,mu,sigma_n2,phi,alpha,alpha01,log_posterior
struct SampleRow {
  long draw = 0;
  ModelParams params;
  double log_posterior = 0.0;
};
void write_samples(const std::string& path,
                   const std::vector<PosteriorSample>& samples);
std::vector<SampleRow> read_samples(const std::string& path);

// state_probs.csv: year,day_of_season,inclusion_count,n_draws,probability
void write_state_probs(const std::string& path,
                       const std::vector<SummerSegment>& observed,
                       const std::vector<PosteriorSample>& samples);

// state_runs.csv: draw,year,start_day,length
void write_state_runs(const std::string& path,
                      const std::vector<SummerSegment>& observed,
                      const std::vector<PosteriorSample>& samples);
std::vector<StateRunRecord> read_state_runs(const std::string& path);

// imputed.csv: draw,year,day_of_season,value
void write_imputed(const std::string& path,
                   const std::vector<SummerSegment>& observed,
                   const std::vector<PosteriorSample>& samples);

// summers.csv: draw_index,summer_index,day,value,state
class SummerWriter {
 public:
  explicit SummerWriter(const std::string& path);
  ~SummerWriter();
  void append(long draw_index, int summer_index, const SimulatedSummer& s);

 private:
  void* out_;  // FILE*
};

// events_<rule>.csv: draw,summer,start_day,length,mean_temp
// frequency_<rule>.csv: draw,summer,n_events
void write_events(const std::string& path,
                  const std::vector<std::tuple<long, int, HeatWaveEvent>>& rows);
void write_frequencies(const std::string& path,
                       const std::vector<std::tuple<long, int, int>>& rows);

// pmf CSVs: value,probability
void write_pmf(const std::string& path, const std::map<int, double>& pmf,
               const std::string& value_column);
void write_values(const std::string& path, const std::vector<double>& values,
                  const std::string& column);

// chi curve: quantile,threshold,chi
void write_chi_curve(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve,
                     const std::vector<double>& thresholds);

// pacf.csv: lag,pacf,band
void write_pacf(const std::string& path, const PacfResult& r);

// ppc.csv: statistic,lower,observed,upper,inside,excluded_replicates
void write_ppc(const std::string& path, const PPCReport& report);

}  // namespace hw::csv
