#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "model.hpp"

// Station-file ingestion, JJA segment extraction, and de-seasonalization by
// an absolute-loss penalized spline.

namespace hw {

struct CalDate {
  int year = 0;
  int month = 0;
  int day = 0;

  friend auto operator<=>(const CalDate&, const CalDate&) = default;
};

enum class Quality { Valid, Suspect, Missing };

struct RawStationSeries {
  std::vector<CalDate> dates;      // strictly increasing
  std::vector<double> tx;          // degC
  std::vector<Quality> quality;
};

// ECA&D blended-series text layout: free header block, then comma-separated
// SOUID, DATE (YYYYMMDD), TX (tenths of degC), Q_TX rows. TX = -9999 and
// Q_TX = 9 are missing; Q_TX = 1 is suspect. Throws ParseError with a line
// number on malformed content.
RawStationSeries parse_ecad(std::istream& in, const std::string& source_name);
RawStationSeries parse_ecad_file(const std::string& path);

// Plain two-column CSV: date (YYYY-MM-DD or YYYYMMDD), value in degC.
// Empty, "NA" or "NaN" values are missing.
RawStationSeries parse_csv(std::istream& in, const std::string& source_name);
RawStationSeries parse_csv_file(const std::string& path);

constexpr int kSeasonLength = 92;  // Jun 1 .. Aug 31

// 1-based day-of-season for a JJA date; 0 for non-JJA dates.
int jja_day_of_season(const CalDate& d);

struct JjaExtraction {
  std::vector<SummerSegment> segments;      // one per year, length 92
  std::vector<std::string> warnings;        // e.g. years > 50% missing
  long suspect_count = 0;                   // kept (or dropped) suspect days
};

// One 92-day segment per year in [year_from, year_to]; absent dates become
// missing. drop_suspect maps Q=1 days to missing instead of keeping them.
JjaExtraction extract_jja(const RawStationSeries& series, int year_from,
                          int year_to, bool drop_suspect = false);

// Cubic B-spline basis with equally spaced interior knots on [lo, hi]
// (clamped ends).
class CubicBSplineBasis {
 public:
  CubicBSplineBasis(double lo, double hi, int interior_knots);
  int size() const { return n_basis_; }
  std::vector<double> eval(double x) const;

 private:
  std::vector<double> knots_;
  int n_basis_;
  double lo_, hi_;
};

struct SeasonalSplineOptions {
  int interior_knots = 12;
  double epsilon = 1e-4;      // smooth-absolute surrogate, degC
  double coef_tol = 1e-8;
  int max_iterations = 500;
};

// Median-regression smoother: L1 loss via IRLS with the sqrt(r^2 + eps^2)
// surrogate, second-difference penalty with weight lambda on the basis
// coefficients. day_of_season is 1-based. Returns the fitted curve at days
// 1..season_length. Throws NumericError if IRLS does not converge.
std::vector<double> fit_seasonal_quantile_spline(
    const std::vector<int>& day_of_season, const std::vector<double>& values,
    double lambda, int season_length = kSeasonLength,
    const SeasonalSplineOptions& opts = {});

// 5-fold cross-validation on absolute error over a log-spaced lambda grid;
// deterministic fold assignment (index mod 5).
double cross_validate_smoothing(const std::vector<int>& day_of_season,
                                const std::vector<double>& values,
                                int season_length = kSeasonLength,
                                const SeasonalSplineOptions& opts = {});

// Pools observed (day, value) pairs from segments and fits the curve; lambda
// < 0 requests cross-validation.
std::vector<double> fit_seasonal_curve(const std::vector<SummerSegment>& segments,
                                       double lambda,
                                       const SeasonalSplineOptions& opts = {});

// y' = y - curve(day) + median(all observed values); missing stays missing.
std::vector<SummerSegment> deseasonalize(const std::vector<SummerSegment>& segments,
                                         const std::vector<double>& curve,
                                         double* median_out = nullptr);

}  // namespace hw
