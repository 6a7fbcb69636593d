#include "preprocess.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace hw {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && leap(y)) return 29;
  return d[m - 1];
}

bool valid_date(const CalDate& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_long(const std::string& field, long& out) {
  std::string t = trim(field);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(t, &pos);
  } catch (...) {
    return false;
  }
  return pos == t.size();
}

CalDate parse_yyyymmdd(long v) {
  CalDate d;
  d.year = static_cast<int>(v / 10000);
  d.month = static_cast<int>((v / 100) % 100);
  d.day = static_cast<int>(v % 100);
  return d;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void parse_fail(const std::string& src, long line,
                             const std::string& what) {
  throw ParseError(src + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

RawStationSeries parse_ecad(std::istream& in, const std::string& src) {
  RawStationSeries out;
  std::string line;
  long lineno = 0;
  bool in_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (!in_data) {
      // The header block ends at the column-name line.
      std::string upper;
      for (char c : t) upper.push_back(static_cast<char>(std::toupper(c)));
      if (upper.find("SOUID") != std::string::npos &&
          upper.find("DATE") != std::string::npos)
        in_data = true;
      continue;
    }
    if (t.empty()) continue;
    auto fields = split_csv(t);
    if (fields.size() != 4)
      parse_fail(src, lineno, "expected 4 comma-separated fields, got " +
                               std::to_string(fields.size()));
    long souid, date_raw, tx_raw, q_raw;
    if (!parse_long(fields[0], souid)) parse_fail(src, lineno, "bad SOUID field");
    if (!parse_long(fields[1], date_raw))
      parse_fail(src, lineno, "bad DATE field '" + trim(fields[1]) + "'");
    if (!parse_long(fields[2], tx_raw)) parse_fail(src, lineno, "bad TX field");
    if (!parse_long(fields[3], q_raw)) parse_fail(src, lineno, "bad Q_TX field");

    CalDate d = parse_yyyymmdd(date_raw);
    if (!valid_date(d))
      parse_fail(src, lineno, "invalid date " + std::to_string(date_raw));
    if (!out.dates.empty() && !(out.dates.back() < d))
      parse_fail(src, lineno, "dates not strictly increasing");
    if (q_raw != 0 && q_raw != 1 && q_raw != 9)
      parse_fail(src, lineno, "unknown quality flag " + std::to_string(q_raw));

    Quality q = Quality::Valid;
    if (q_raw == 9 || tx_raw == -9999)
      q = Quality::Missing;
    else if (q_raw == 1)
      q = Quality::Suspect;

    out.dates.push_back(d);
    out.tx.push_back(static_cast<double>(tx_raw) / 10.0);
    out.quality.push_back(q);
  }
  if (!in_data)
    throw ParseError(src + ": no SOUID/DATE column header line found");
  return out;
}

RawStationSeries parse_ecad_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_ecad(in, path);
}

RawStationSeries parse_csv(std::istream& in, const std::string& src) {
  RawStationSeries out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (lineno == 1 && !t.empty() && !std::isdigit(static_cast<unsigned char>(t[0])))
      continue;  // header row
    auto fields = split_csv(t);
    if (fields.size() != 2)
      parse_fail(src, lineno, "expected 2 comma-separated fields");

    std::string ds = trim(fields[0]);
    CalDate d;
    long raw;
    if (ds.size() == 10 && ds[4] == '-' && ds[7] == '-') {
      try {
        d.year = std::stoi(ds.substr(0, 4));
        d.month = std::stoi(ds.substr(5, 2));
        d.day = std::stoi(ds.substr(8, 2));
      } catch (...) {
        parse_fail(src, lineno, "bad date '" + ds + "'");
      }
    } else if (parse_long(ds, raw)) {
      d = parse_yyyymmdd(raw);
    } else {
      parse_fail(src, lineno, "bad date '" + ds + "'");
    }
    if (!valid_date(d)) parse_fail(src, lineno, "invalid date '" + ds + "'");
    if (!out.dates.empty() && !(out.dates.back() < d))
      parse_fail(src, lineno, "dates not strictly increasing");

    std::string vs = trim(fields[1]);
    double value = 0.0;
    Quality q = Quality::Valid;
    if (vs.empty() || vs == "NA" || vs == "NaN" || vs == "nan") {
      q = Quality::Missing;
    } else {
      try {
        std::size_t pos = 0;
        value = std::stod(vs, &pos);
        if (pos != vs.size()) parse_fail(src, lineno, "bad value '" + vs + "'");
      } catch (const ParseError&) {
        throw;
      } catch (...) {
        parse_fail(src, lineno, "bad value '" + vs + "'");
      }
    }
    out.dates.push_back(d);
    out.tx.push_back(value);
    out.quality.push_back(q);
  }
  return out;
}

RawStationSeries parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_csv(in, path);
}

int jja_day_of_season(const CalDate& d) {
  switch (d.month) {
    case 6: return d.day;
    case 7: return 30 + d.day;
    case 8: return 61 + d.day;
    default: return 0;
  }
}

JjaExtraction extract_jja(const RawStationSeries& series, int year_from,
                          int year_to, bool drop_suspect) {
  if (year_to < year_from)
    throw ArgumentError("extract_jja: year_to before year_from");
  JjaExtraction out;

  std::map<std::pair<int, int>, std::size_t> index;  // (year, day) -> row
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    int ds = jja_day_of_season(series.dates[i]);
    if (ds > 0) index[{series.dates[i].year, ds}] = i;
  }

  for (int year = year_from; year <= year_to; ++year) {
    SummerSegment seg;
    seg.year = year;
    seg.values.assign(kSeasonLength, kNaN);
    seg.missing.assign(kSeasonLength, 1);
    for (int ds = 1; ds <= kSeasonLength; ++ds) {
      auto it = index.find({year, ds});
      if (it == index.end()) continue;
      std::size_t i = it->second;
      Quality q = series.quality[i];
      if (q == Quality::Missing) continue;
      if (q == Quality::Suspect) {
        ++out.suspect_count;
        if (drop_suspect) continue;
      }
      seg.values[ds - 1] = series.tx[i];
      seg.missing[ds - 1] = 0;
    }
    if (seg.missing_count() * 2 > static_cast<std::size_t>(kSeasonLength))
      out.warnings.push_back("year " + std::to_string(year) + ": " +
                             std::to_string(seg.missing_count()) + " of " +
                             std::to_string(kSeasonLength) + " days missing");
    out.segments.push_back(std::move(seg));
  }
  return out;
}

CubicBSplineBasis::CubicBSplineBasis(double lo, double hi, int interior_knots)
    : lo_(lo), hi_(hi) {
  if (interior_knots < 0 || !(hi > lo))
    throw ArgumentError("CubicBSplineBasis: bad knot configuration");
  const int degree = 3;
  for (int i = 0; i <= degree; ++i) knots_.push_back(lo);
  for (int k = 1; k <= interior_knots; ++k)
    knots_.push_back(lo + (hi - lo) * k / (interior_knots + 1));
  for (int i = 0; i <= degree; ++i) knots_.push_back(hi);
  n_basis_ = static_cast<int>(knots_.size()) - degree - 1;
}

std::vector<double> CubicBSplineBasis::eval(double x) const {
  const int degree = 3;
  x = std::clamp(x, lo_, hi_);
  std::vector<double> b(n_basis_, 0.0);

  // Cox-de Boor over the full basis (small n, clarity over speed).
  std::vector<double> n0(knots_.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    if ((x >= knots_[i] && x < knots_[i + 1]) ||
        (x == hi_ && knots_[i] < knots_[i + 1] && knots_[i + 1] == hi_))
      n0[i] = 1.0;
  std::vector<double> prev = n0;
  for (int d = 1; d <= degree; ++d) {
    std::vector<double> cur(knots_.size() - d - 1, 0.0);
    for (std::size_t i = 0; i + d + 1 < knots_.size(); ++i) {
      double left = 0.0, right = 0.0;
      double dl = knots_[i + d] - knots_[i];
      double dr = knots_[i + d + 1] - knots_[i + 1];
      if (dl > 0.0) left = (x - knots_[i]) / dl * prev[i];
      if (dr > 0.0) right = (knots_[i + d + 1] - x) / dr * prev[i + 1];
      cur[i] = left + right;
    }
    prev = std::move(cur);
  }
  for (int i = 0; i < n_basis_; ++i) b[i] = prev[i];
  return b;
}

std::vector<double> fit_seasonal_quantile_spline(
    const std::vector<int>& day_of_season, const std::vector<double>& values,
    double lambda, int season_length, const SeasonalSplineOptions& opts) {
  if (day_of_season.size() != values.size())
    throw ArgumentError("quantile spline: day/value size mismatch");
  if (values.empty()) throw ArgumentError("quantile spline: no data");
  if (lambda < 0.0) throw ArgumentError("quantile spline: negative lambda");

  CubicBSplineBasis basis(1.0, static_cast<double>(season_length),
                          opts.interior_knots);
  const int nb = basis.size();
  const int n = static_cast<int>(values.size());

  Eigen::MatrixXd B(n, nb);
  for (int i = 0; i < n; ++i) {
    auto row = basis.eval(static_cast<double>(day_of_season[i]));
    for (int j = 0; j < nb; ++j) B(i, j) = row[j];
  }
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), n);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nb - 2, nb);
  for (int i = 0; i < nb - 2; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  Eigen::MatrixXd P = lambda * D.transpose() * D;

  // Unweighted ridge start, then IRLS on the smooth-absolute surrogate.
  Eigen::VectorXd c =
      (B.transpose() * B + P).ldlt().solve(B.transpose() * y);
  const double eps2 = opts.epsilon * opts.epsilon;

  auto objective = [&](const Eigen::VectorXd& coef) {
    Eigen::VectorXd r = y - B * coef;
    double j = 0.0;
    for (int i = 0; i < n; ++i) j += std::sqrt(r(i) * r(i) + eps2);
    return j + 0.5 * coef.dot(P * coef);
  };
  auto irls_step = [&](const Eigen::VectorXd& coef) {
    Eigen::VectorXd r = y - B * coef;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = 1.0 / std::sqrt(r(i) * r(i) + eps2);
    Eigen::MatrixXd BtWB = B.transpose() * w.asDiagonal() * B + P;
    Eigen::VectorXd BtWy = B.transpose() * (w.asDiagonal() * y);
    return Eigen::VectorXd(BtWB.ldlt().solve(BtWy));
  };

  // The plain majorize-minimize iteration converges linearly; an Aitken
  // extrapolation toward the fixed point, kept only when it does not
  // increase the objective, removes the slow geometric tail. The converged
  // curve is the same fixed point either way.
  bool converged = false;
  Eigen::VectorXd prev_delta = Eigen::VectorXd::Zero(nb);
  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd cn = irls_step(c);
    Eigen::VectorXd delta = cn - c;
    if (delta.cwiseAbs().maxCoeff() < opts.coef_tol) {
      c = cn;
      converged = true;
      break;
    }
    if (it > 0) {
      double d11 = prev_delta.squaredNorm();
      double rate = d11 > 0.0 ? delta.dot(prev_delta) / d11 : 0.0;
      if (rate > 0.2 && rate < 0.9999) {
        Eigen::VectorXd ext = cn + delta * (rate / (1.0 - rate));
        if (objective(ext) <= objective(cn)) {
          prev_delta = ext - c;
          c = ext;
          continue;
        }
      }
    }
    prev_delta = delta;
    c = cn;
  }
  if (!converged)
    throw NumericError("quantile spline IRLS did not converge in " +
                       std::to_string(opts.max_iterations) + " iterations");

  std::vector<double> curve(season_length);
  for (int d = 1; d <= season_length; ++d) {
    auto row = basis.eval(static_cast<double>(d));
    double v = 0.0;
    for (int j = 0; j < nb; ++j) v += row[j] * c(j);
    curve[d - 1] = v;
  }
  return curve;
}

double cross_validate_smoothing(const std::vector<int>& day_of_season,
                                const std::vector<double>& values,
                                int season_length,
                                const SeasonalSplineOptions& opts) {
  static const double grid[] = {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4};
  const int folds = 5;
  const int n = static_cast<int>(values.size());
  if (n < 2 * folds) return 10.0;

  double best_lambda = grid[0];
  double best_mae = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double abs_err = 0.0;
    long held = 0;
    bool failed = false;
    for (int f = 0; f < folds && !failed; ++f) {
      std::vector<int> dtr;
      std::vector<double> vtr;
      std::vector<int> dte;
      std::vector<double> vte;
      for (int i = 0; i < n; ++i) {
        if (i % folds == f) {
          dte.push_back(day_of_season[i]);
          vte.push_back(values[i]);
        } else {
          dtr.push_back(day_of_season[i]);
          vtr.push_back(values[i]);
        }
      }
      try {
        auto curve =
            fit_seasonal_quantile_spline(dtr, vtr, lambda, season_length, opts);
        for (std::size_t i = 0; i < dte.size(); ++i) {
          abs_err += std::abs(vte[i] - curve[dte[i] - 1]);
          ++held;
        }
      } catch (const NumericError&) {
        failed = true;
      }
    }
    if (failed || held == 0) continue;
    double mae = abs_err / static_cast<double>(held);
    if (mae < best_mae) {
      best_mae = mae;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

std::vector<double> fit_seasonal_curve(const std::vector<SummerSegment>& segments,
                                       double lambda,
                                       const SeasonalSplineOptions& opts) {
  std::vector<int> days;
  std::vector<double> vals;
  int season_length = 0;
  for (const auto& seg : segments) {
    season_length = std::max(season_length, static_cast<int>(seg.size()));
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (!seg.missing[t]) {
        days.push_back(static_cast<int>(t) + 1);
        vals.push_back(seg.values[t]);
      }
  }
  if (vals.empty()) throw ArgumentError("seasonal curve: no observed values");
  if (lambda < 0.0)
    lambda = cross_validate_smoothing(days, vals, season_length, opts);
  return fit_seasonal_quantile_spline(days, vals, lambda, season_length, opts);
}

std::vector<SummerSegment> deseasonalize(const std::vector<SummerSegment>& segments,
                                         const std::vector<double>& curve,
                                         double* median_out) {
  std::vector<double> pooled = pooled_observed(segments);
  if (pooled.empty()) throw ArgumentError("deseasonalize: no observed values");
  double median = empirical_quantile(pooled, 0.5);
  if (median_out) *median_out = median;

  std::vector<SummerSegment> out = segments;
  for (auto& seg : out) {
    if (seg.size() != curve.size())
      throw ArgumentError("deseasonalize: segment length != curve length");
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (!seg.missing[t]) seg.values[t] = seg.values[t] - curve[t] + median;
  }
  return out;
}

}  // namespace hw
