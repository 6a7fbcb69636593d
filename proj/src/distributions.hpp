#pragma once

#include <cmath>
#include <limits>

// Scalar distribution functions used throughout the model: stable normal
// log-CDF and quantile, generalized Pareto density/CDF/quantile with the
// exponential-limit branch at small |xi|.

namespace hw {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// |xi| below this uses the exponential-limit formulas.
inline constexpr double kXiExpLimit = 1e-8;

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double norm_pdf(double x);
double norm_log_pdf(double x);
double norm_cdf(double x);

// log Phi(x), finite for all finite x (asymptotic expansion below x = -20).
double norm_log_cdf(double x);

// Inverse of Phi, Wichura's AS241 (PPND16), ~1e-15 relative accuracy.
double norm_quantile(double p);

// --- Generalized Pareto, survivor (1 + xi (y-u)/sigma)^(-1/xi) ---

bool gpd_in_support(double y, double u, double sigma, double xi);

// log density; -inf sentinel outside support.
double gpd_log_density(double y, double u, double sigma, double xi);

// log of the survivor function P(Y > y | Y > u); -inf above the upper endpoint.
double gpd_log_survivor(double y, double u, double sigma, double xi);

// log F(y); -inf at y = u (F = 0).
double gpd_log_cdf(double y, double u, double sigma, double xi);
double gpd_cdf(double y, double u, double sigma, double xi);

// F^{-1}(p) for p in [0,1).
double gpd_quantile(double p, double u, double sigma, double xi);

}  // namespace hw
