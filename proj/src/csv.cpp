#include "csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace hw::csv {

namespace {

std::FILE* open_write(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  return f;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& path, long line) {
  if (s == "NA") return kNaN;
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad number '" + s +
                     "'");
  }
}

long to_long(const std::string& s, const std::string& path, long line) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad integer '" + s +
                     "'");
  }
}

// Reads a CSV with an exact expected header.
std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 const std::string& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ParseError(path + ": unexpected header '" + line + "', expected '" +
                     header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line));
  }
  return rows;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_segments(const std::string& path,
                    const std::vector<SummerSegment>& segments) {
  std::FILE* f = open_write(path);
  std::fputs("year,day_of_season,value,missing\n", f);
  for (const auto& seg : segments)
    for (std::size_t t = 0; t < seg.size(); ++t) {
      if (seg.missing[t])
        std::fprintf(f, "%d,%zu,NA,1\n", seg.year, t + 1);
      else
        std::fprintf(f, "%d,%zu,%s,0\n", seg.year, t + 1,
                     format_number(seg.values[t]).c_str());
    }
  std::fclose(f);
}

std::vector<SummerSegment> read_segments(const std::string& path) {
  auto rows = read_table(path, "year,day_of_season,value,missing");
  std::vector<SummerSegment> out;
  long lineno = 1;
  for (const auto& r : rows) {
    ++lineno;
    if (r.size() != 4)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    int year = static_cast<int>(to_long(r[0], path, lineno));
    long day = to_long(r[1], path, lineno);
    bool miss = to_long(r[3], path, lineno) != 0;
    double value = miss ? kNaN : to_double(r[2], path, lineno);
    if (out.empty() || out.back().year != year) {
      out.emplace_back();
      out.back().year = year;
    }
    auto& seg = out.back();
    if (day != static_cast<long>(seg.size()) + 1)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": day_of_season not consecutive");
    seg.values.push_back(value);
    seg.missing.push_back(miss ? 1 : 0);
  }
  return out;
}

void write_curve(const std::string& path, const std::vector<double>& curve) {
  std::FILE* f = open_write(path);
  std::fputs("day_of_season,value\n", f);
  for (std::size_t d = 0; d < curve.size(); ++d)
    std::fprintf(f, "%zu,%s\n", d + 1, format_number(curve[d]).c_str());
  std::fclose(f);
}

std::vector<double> read_curve(const std::string& path) {
  auto rows = read_table(path, "day_of_season,value");
  std::vector<double> out;
  long lineno = 1;
  for (const auto& r : rows) {
    ++lineno;
    if (r.size() != 2)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 2 fields");
    out.push_back(to_double(r[1], path, lineno));
  }
  return out;
}

namespace {
constexpr const char* kSamplesHeader =
    "draw,a0,a1,u,sigma,xi,mu,sigma_n2,phi,alpha,alpha01,log_posterior";
}

void write_samples(const std::string& path,
                   const std::vector<PosteriorSample>& samples) {
  std::FILE* f = open_write(path);
  std::fputs(kSamplesHeader, f);
  std::fputc('\n', f);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i].params;
    std::fprintf(f, "%zu,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n", i,
                 format_number(p.a0).c_str(), format_number(p.a1).c_str(),
                 format_number(p.u).c_str(), format_number(p.sigma).c_str(),
                 format_number(p.xi).c_str(), format_number(p.mu).c_str(),
                 format_number(p.sigma_n2).c_str(), format_number(p.phi).c_str(),
                 format_number(p.alpha).c_str(), format_number(p.alpha01).c_str(),
                 format_number(samples[i].log_posterior).c_str());
  }
  std::fclose(f);
}

std::vector<SampleRow> read_samples(const std::string& path) {
  auto rows = read_table(path, kSamplesHeader);
  std::vector<SampleRow> out;
  long lineno = 1;
  for (const auto& r : rows) {
    ++lineno;
    if (r.size() != 12)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 12 fields");
    SampleRow s;
    s.draw = to_long(r[0], path, lineno);
    s.params.a0 = to_double(r[1], path, lineno);
    s.params.a1 = to_double(r[2], path, lineno);
    s.params.u = to_double(r[3], path, lineno);
    s.params.sigma = to_double(r[4], path, lineno);
    s.params.xi = to_double(r[5], path, lineno);
    s.params.mu = to_double(r[6], path, lineno);
    s.params.sigma_n2 = to_double(r[7], path, lineno);
    s.params.phi = to_double(r[8], path, lineno);
    s.params.alpha = to_double(r[9], path, lineno);
    s.params.alpha01 = to_double(r[10], path, lineno);
    s.log_posterior = to_double(r[11], path, lineno);
    out.push_back(std::move(s));
  }
  return out;
}

void write_state_probs(const std::string& path,
                       const std::vector<SummerSegment>& observed,
                       const std::vector<PosteriorSample>& samples) {
  std::FILE* f = open_write(path);
  std::fputs("year,day_of_season,inclusion_count,n_draws,probability\n", f);
  const long n = static_cast<long>(samples.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    for (std::size_t t = 0; t < observed[i].size(); ++t) {
      long count = 0;
      for (const auto& s : samples) count += s.states[i][t];
      std::fprintf(f, "%d,%zu,%ld,%ld,%s\n", observed[i].year, t + 1, count, n,
                   format_number(n > 0 ? static_cast<double>(count) / n : kNaN)
                       .c_str());
    }
  }
  std::fclose(f);
}

void write_state_runs(const std::string& path,
                      const std::vector<SummerSegment>& observed,
                      const std::vector<PosteriorSample>& samples) {
  std::FILE* f = open_write(path);
  std::fputs("draw,year,start_day,length\n", f);
  for (std::size_t d = 0; d < samples.size(); ++d)
    for (std::size_t i = 0; i < observed.size(); ++i) {
      auto events = detect_implicit({}, samples[d].states[i]);
      for (const auto& ev : events)
        std::fprintf(f, "%zu,%d,%d,%d\n", d, observed[i].year, ev.start_day,
                     ev.length);
    }
  std::fclose(f);
}

std::vector<StateRunRecord> read_state_runs(const std::string& path) {
  auto rows = read_table(path, "draw,year,start_day,length");
  std::vector<StateRunRecord> out;
  long lineno = 1;
  for (const auto& r : rows) {
    ++lineno;
    if (r.size() != 4)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    StateRunRecord rec;
    rec.draw = to_long(r[0], path, lineno);
    rec.year = static_cast<int>(to_long(r[1], path, lineno));
    rec.start_day = static_cast<int>(to_long(r[2], path, lineno));
    rec.length = static_cast<int>(to_long(r[3], path, lineno));
    out.push_back(rec);
  }
  return out;
}

void write_imputed(const std::string& path,
                   const std::vector<SummerSegment>& observed,
                   const std::vector<PosteriorSample>& samples) {
  std::FILE* f = open_write(path);
  std::fputs("draw,year,day_of_season,value\n", f);
  for (std::size_t d = 0; d < samples.size(); ++d)
    for (std::size_t i = 0; i < samples[d].imputed.size(); ++i)
      for (const auto& [t, v] : samples[d].imputed[i])
        std::fprintf(f, "%zu,%d,%d,%s\n", d, observed[i].year, t + 1,
                     format_number(v).c_str());
  std::fclose(f);
}

SummerWriter::SummerWriter(const std::string& path) {
  std::FILE* f = open_write(path);
  std::fputs("draw_index,summer_index,day,value,state\n", f);
  out_ = f;
}

SummerWriter::~SummerWriter() {
  if (out_) std::fclose(static_cast<std::FILE*>(out_));
}

void SummerWriter::append(long draw_index, int summer_index,
                          const SimulatedSummer& s) {
  std::FILE* f = static_cast<std::FILE*>(out_);
  for (std::size_t t = 0; t < s.values.size(); ++t)
    std::fprintf(f, "%ld,%d,%zu,%s,%d\n", draw_index, summer_index, t + 1,
                 format_number(s.values[t]).c_str(),
                 static_cast<int>(s.states[t]));
}

void write_events(const std::string& path,
                  const std::vector<std::tuple<long, int, HeatWaveEvent>>& rows) {
  std::FILE* f = open_write(path);
  std::fputs("draw,summer,start_day,length,mean_temp\n", f);
  for (const auto& [d, k, ev] : rows)
    std::fprintf(f, "%ld,%d,%d,%d,%s\n", d, k, ev.start_day, ev.length,
                 format_number(ev.mean_temp()).c_str());
  std::fclose(f);
}

void write_frequencies(const std::string& path,
                       const std::vector<std::tuple<long, int, int>>& rows) {
  std::FILE* f = open_write(path);
  std::fputs("draw,summer,n_events\n", f);
  for (const auto& [d, k, n] : rows) std::fprintf(f, "%ld,%d,%d\n", d, k, n);
  std::fclose(f);
}

void write_pmf(const std::string& path, const std::map<int, double>& pmf,
               const std::string& value_column) {
  std::FILE* f = open_write(path);
  std::fprintf(f, "%s,probability\n", value_column.c_str());
  for (const auto& [v, p] : pmf)
    std::fprintf(f, "%d,%s\n", v, format_number(p).c_str());
  std::fclose(f);
}

void write_values(const std::string& path, const std::vector<double>& values,
                  const std::string& column) {
  std::FILE* f = open_write(path);
  std::fprintf(f, "%s\n", column.c_str());
  for (double v : values) std::fprintf(f, "%s\n", format_number(v).c_str());
  std::fclose(f);
}

void write_chi_curve(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve,
                     const std::vector<double>& thresholds) {
  std::FILE* f = open_write(path);
  std::fputs("quantile,threshold,chi\n", f);
  for (std::size_t i = 0; i < curve.size(); ++i)
    std::fprintf(f, "%s,%s,%s\n", format_number(curve[i].first).c_str(),
                 format_number(thresholds[i]).c_str(),
                 format_number(curve[i].second).c_str());
  std::fclose(f);
}

void write_pacf(const std::string& path, const PacfResult& r) {
  std::FILE* f = open_write(path);
  std::fputs("lag,pacf,band\n", f);
  for (std::size_t k = 0; k < r.values.size(); ++k)
    std::fprintf(f, "%zu,%s,%s\n", k + 1, format_number(r.values[k]).c_str(),
                 format_number(r.band).c_str());
  std::fclose(f);
}

void write_ppc(const std::string& path, const PPCReport& report) {
  std::FILE* f = open_write(path);
  std::fputs("statistic,lower,observed,upper,inside,excluded_replicates\n", f);
  for (const auto& e : report.entries)
    std::fprintf(f, "%s,%s,%s,%s,%s,%ld\n", e.name.c_str(),
                 format_number(e.lower).c_str(),
                 format_number(e.observed).c_str(),
                 format_number(e.upper).c_str(), e.inside ? "yes" : "no",
                 e.excluded_replicates);
  std::fclose(f);
}

}  // namespace hw::csv
